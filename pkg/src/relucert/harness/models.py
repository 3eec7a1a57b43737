"""Pydantic models for experiment specs, summaries and stored artifacts.

- ExperimentSpec: which (k, n) configurations to run and how
- SummaryRow: one line of the summary table
- CandidateFile: on-disk form of a descent run (schema "candidate/1")
- CertificateFile: on-disk form of a certificate (schema "certificate/1")
- LiftReportFile: on-disk form of a lift report (schema "lift/1")

Floats are written as repr strings, which round-trip every double
exactly; pydantic parses them back in lax mode.
"""

import warnings
from pathlib import Path
from typing import Annotated, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, PlainSerializer, model_validator

from relucert.models.records import (
    DEFAULT_GRAD_TOL,
    DEFAULT_MAX_ITERS,
    DEFAULT_STEP_SIZE,
)
from relucert.rigor.enclosure import DEFAULT_PRECISION, MIN_PRECISION
from relucert.search.cluster import DEFAULT_DEDUP_THRESHOLD

CANDIDATE_SCHEMA = "candidate/1"
CERTIFICATE_SCHEMA = "certificate/1"
LIFT_SCHEMA = "lift/1"

ExactFloat = Annotated[float, PlainSerializer(lambda x: repr(float(x)), return_type=str)]


class ExperimentSpec(BaseModel):
    """Configuration of a full search-and-certify experiment."""

    model_config = ConfigDict(frozen=True)

    k_range: List[int] = Field(min_length=1, description="Target widths to run")
    n_rule: Literal["n=k", "n=k+1", "pairs"] = Field(
        default="n=k", description="How n is derived from k"
    )
    pairs: List[Tuple[int, int]] = Field(
        default_factory=list, description="Explicit (k, n) pairs when n_rule is 'pairs'"
    )
    runs_per_config: int = Field(default=1000, ge=1, description="Descent runs per (k, n)")
    base_seed: int = Field(default=0, ge=0, description="Seed every run stream derives from")
    precision_bits: int = Field(
        default=DEFAULT_PRECISION, ge=MIN_PRECISION, description="Starting MPFR precision"
    )
    output_dir: Path = Field(default=Path("out"), description="Artifact directory")
    step_size: float = Field(default=DEFAULT_STEP_SIZE, gt=0.0)
    grad_tol: float = Field(default=DEFAULT_GRAD_TOL, gt=0.0)
    max_iters: int = Field(default=DEFAULT_MAX_ITERS, ge=1)
    dedup_threshold: float = Field(default=DEFAULT_DEDUP_THRESHOLD, gt=0.0)
    workers: Optional[int] = Field(
        default=None, ge=1, description="Process pool size (None uses the CPU count)"
    )

    @model_validator(mode="after")
    def _check_pairs(self) -> "ExperimentSpec":
        if self.n_rule == "pairs" and not self.pairs:
            raise ValueError("n_rule 'pairs' needs at least one (k, n) pair")
        for k, n in self.configurations():
            if not n >= k >= 1:
                raise ValueError(f"configuration (k={k}, n={n}) violates n >= k >= 1")
        return self

    def configurations(self) -> List[Tuple[int, int]]:
        """(k, n) pairs in run order."""
        if self.n_rule == "pairs":
            return [tuple(p) for p in self.pairs]
        offset = 1 if self.n_rule == "n=k+1" else 0
        return [(k, k + offset) for k in self.k_range]


class SummaryRow(BaseModel):
    """Aggregate of one (k, n) configuration.

    Percentages are against all runs, singular ones included; averages
    only over certified points.
    """

    k: int = Field(ge=1)
    n: int = Field(ge=1)
    runs: int = Field(ge=0)
    singular: int = Field(default=0, ge=0, description="Runs that hit a zero neuron")
    pct_certified: float = Field(ge=0.0, le=100.0)
    pct_unverified: float = Field(ge=0.0, le=100.0)
    avg_lambda_min: Optional[float] = None
    avg_objective: Optional[float] = None


class _StoredFile(BaseModel):
    """Shared behaviour of stored artifacts: schema tag and forward compatibility."""

    model_config = ConfigDict(extra="allow", populate_by_name=True)

    schema_id: str = Field(alias="schema")

    @model_validator(mode="after")
    def _warn_extra(self):
        if self.model_extra:
            warnings.warn(
                f"{self.schema_id}: ignoring unknown fields {sorted(self.model_extra)}",
                stacklevel=2,
            )
        return self

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, indent=2)


class CandidateFile(_StoredFile):
    """A descent run's terminal point.

    objective and grad_norm may be null for hand-entered starting points.
    """

    schema_id: str = Field(default=CANDIDATE_SCHEMA, alias="schema")
    k: int = Field(ge=1)
    n: int = Field(ge=1)
    seed: int = Field(ge=0)
    step_size: ExactFloat = DEFAULT_STEP_SIZE
    grad_tol: ExactFloat = DEFAULT_GRAD_TOL
    max_iters: int = DEFAULT_MAX_ITERS
    iterations: int = Field(default=0, ge=0)
    objective: Optional[ExactFloat] = None
    grad_norm: Optional[ExactFloat] = None
    classification: Optional[str] = None
    descent_violations: int = 0
    W: List[List[ExactFloat]] = Field(description="Neurons as rows, n x k")


class TransferLinkFile(BaseModel):
    """Stored form of a transferred certificate."""

    member_ref: str
    distance: ExactFloat
    r_member: ExactFloat
    lambda_lower: ExactFloat
    objective_lower: ExactFloat


class CertificateFile(_StoredFile):
    """A certificate with the point and targets it speaks about."""

    schema_id: str = Field(default=CERTIFICATE_SCHEMA, alias="schema")
    point_ref: str
    epsilon: ExactFloat
    lambda_min: ExactFloat
    B: ExactFloat
    alpha: ExactFloat
    r: ExactFloat
    margin: ExactFloat
    objective_lo: ExactFloat
    objective_hi: ExactFloat
    nonglobal: bool
    differentiable_ball: bool
    strict: bool
    precision_bits: int = Field(ge=MIN_PRECISION)
    transfer_chain: List[TransferLinkFile] = Field(default_factory=list)
    W: List[List[ExactFloat]]
    V: List[List[ExactFloat]]


class LiftReportFile(_StoredFile):
    """A lift report for a stored certificate."""

    schema_id: str = Field(default=LIFT_SCHEMA, alias="schema")
    point_ref: str
    lambda_min_lower: ExactFloat
    lift_certified: bool
    spectrum_M: List[ExactFloat]
    M: List[List[ExactFloat]]
    m_note: str
