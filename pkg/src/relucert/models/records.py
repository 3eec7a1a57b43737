"""Gradient descent configuration and run outcomes.

- GDConfig: validated settings for one descent run
- Classification: how a terminal point is labelled
- RunRecord: one descent instantiation and its terminal point
- CandidateClass: permutation-equivalent candidates grouped together
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List

from pydantic import BaseModel, ConfigDict, Field

from relucert.models.points import WeightPoint

DEFAULT_STEP_SIZE = 0.1
DEFAULT_GRAD_TOL = 1e-9
DEFAULT_MAX_ITERS = 1_000_000

# Objective thresholds for labelling terminal points
GLOBAL_LIKE_THRESHOLD = 1e-3
CANDIDATE_THRESHOLD = 1e-2


class GDConfig(BaseModel):
    """Settings for a single plain gradient descent run."""

    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=1, description="Target width and input dimension")
    n: int = Field(ge=1, description="Number of trained neurons")
    seed: int = Field(ge=0, lt=2**64, description="Seed of the private RNG stream")
    step_size: float = Field(
        default=DEFAULT_STEP_SIZE, gt=0.0, description="Fixed step size"
    )
    grad_tol: float = Field(
        default=DEFAULT_GRAD_TOL,
        gt=0.0,
        description="Stop once every neuron's gradient block has at most this norm",
    )
    max_iters: int = Field(
        default=DEFAULT_MAX_ITERS, ge=1, description="Iteration cap"
    )


class Classification(str, Enum):
    """Label of a terminal descent point."""

    GLOBAL_LIKE = "global_like"
    CANDIDATE = "candidate"
    ANOMALY = "anomaly"
    UNCONVERGED = "unconverged"


def classify(objective: float, converged: bool) -> Classification:
    """Label a terminal point from its objective and convergence status."""
    if objective < GLOBAL_LIKE_THRESHOLD:
        return Classification.GLOBAL_LIKE
    if not converged:
        return Classification.UNCONVERGED
    if objective < CANDIDATE_THRESHOLD:
        return Classification.ANOMALY
    return Classification.CANDIDATE


@dataclass(frozen=True, eq=False)
class RunRecord:
    """Outcome of one gradient descent instantiation.

    grad_norm is the largest per-neuron gradient block norm at the
    terminal point (the quantity compared against grad_tol).
    """

    config: GDConfig
    terminal: WeightPoint
    iterations: int
    objective: float
    grad_norm: float
    classification: Classification
    descent_violations: int = 0

    @property
    def converged(self) -> bool:
        return self.grad_norm <= self.config.grad_tol

    @property
    def point_ref(self) -> str:
        """Stable file stem for this run."""
        return f"k{self.config.k}_n{self.config.n}_seed{self.config.seed}"


@dataclass
class CandidateClass:
    """Candidates equivalent up to neuron and coordinate permutations.

    aligned[i] is members[i].terminal permuted onto canonical;
    distances[i] is its Euclidean distance to canonical.
    """

    canonical: WeightPoint
    members: List[RunRecord] = field(default_factory=list)
    aligned: List[WeightPoint] = field(default_factory=list)
    distances: List[float] = field(default_factory=list)
    diameter: float = 0.0

    @property
    def representative(self) -> RunRecord:
        return self.members[0]

    def __len__(self) -> int:
        return len(self.members)
