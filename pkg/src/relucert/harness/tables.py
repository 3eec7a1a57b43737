"""CSV artifacts: the runs ledger, the summary table and CDF data.

Floats are written with repr so the files are reproducible byte for byte.
"""

import csv
import io
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from relucert.certify.models import Certificate
from relucert.harness.models import SummaryRow
from relucert.harness.store import atomic_write
from relucert.models.records import Classification, RunRecord

RUNS_FIELDS = [
    "k",
    "n",
    "seed",
    "classification",
    "objective",
    "iterations",
    "grad_norm",
    "descent_violations",
]
SUMMARY_FIELDS = [
    "k",
    "n",
    "runs",
    "singular",
    "pct_certified",
    "pct_unverified",
    "avg_lambda_min",
    "avg_objective",
]
CDF_FIELDS = ["k", "n", "objective", "cumulative_fraction"]


@dataclass(frozen=True)
class LedgerRow:
    """One line of runs.csv: a run without its terminal point."""

    k: int
    n: int
    seed: int
    classification: Classification
    objective: float
    iterations: int
    grad_norm: float
    descent_violations: int

    @classmethod
    def from_record(cls, record: RunRecord) -> "LedgerRow":
        return cls(
            k=record.config.k,
            n=record.config.n,
            seed=record.config.seed,
            classification=record.classification,
            objective=record.objective,
            iterations=record.iterations,
            grad_norm=record.grad_norm,
            descent_violations=record.descent_violations,
        )

    @property
    def point_ref(self) -> str:
        return f"k{self.k}_n{self.n}_seed{self.seed}"


RunLike = Union[RunRecord, LedgerRow]


def _row(record: RunLike) -> LedgerRow:
    return record if isinstance(record, LedgerRow) else LedgerRow.from_record(record)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, Classification):
        return value.value
    return str(value)


def _to_csv(fields: List[str], rows: Iterable[Dict]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({key: _fmt(row[key]) for key in fields})
    return buffer.getvalue().rstrip("\n")


# =============================================================================
# Runs ledger
# =============================================================================


def write_runs_csv(records: Sequence[RunLike], path: Union[str, Path]) -> Path:
    """Write every run in the given order."""
    path = Path(path)
    rows = [vars(_row(r)) for r in records]
    atomic_write(path, _to_csv(RUNS_FIELDS, rows))
    return path


def read_runs_csv(path: Union[str, Path]) -> List[LedgerRow]:
    """Read a runs ledger back."""
    with open(path, newline="", encoding="utf-8") as f:
        return [
            LedgerRow(
                k=int(row["k"]),
                n=int(row["n"]),
                seed=int(row["seed"]),
                classification=Classification(row["classification"]),
                objective=float(row["objective"]),
                iterations=int(row["iterations"]),
                grad_norm=float(row["grad_norm"]),
                descent_violations=int(row["descent_violations"]),
            )
            for row in csv.DictReader(f)
        ]


# =============================================================================
# Summary table
# =============================================================================


def certified_lambdas(certificates: Iterable[Certificate]) -> Dict[str, float]:
    """Lambda lower bound of every point covered by a certified certificate.

    A class member is covered through its transfer link and reported with
    the transferred bound.
    """
    covered: Dict[str, float] = {}
    for cert in certificates:
        if not cert.is_certified:
            continue
        covered[cert.point_ref] = cert.lambda_min
        for link in cert.transfer_chain:
            covered.setdefault(link.member_ref, link.lambda_lower)
    return covered


def summarize(
    records: Sequence[RunLike],
    certificates: Iterable[Certificate] = (),
    singular: Optional[Mapping[Tuple[int, int], int]] = None,
) -> List[SummaryRow]:
    """One SummaryRow per (k, n), in order of first appearance.

    Certified runs are those covered by a certificate; unverified runs
    are candidates that no certificate covers. singular counts runs per
    (k, n) that hit a zero neuron and left no record; they are part of
    the run total every percentage is taken against.
    """
    covered = certified_lambdas(certificates)
    singular = singular or {}
    groups: Dict[Tuple[int, int], List[LedgerRow]] = defaultdict(list)
    for record in records:
        row = _row(record)
        groups[(row.k, row.n)].append(row)
    for key in singular:
        groups.setdefault(key, [])

    summary = []
    for (k, n), rows in groups.items():
        certified = [r for r in rows if r.point_ref in covered]
        unverified = [
            r
            for r in rows
            if r.classification is Classification.CANDIDATE and r.point_ref not in covered
        ]
        lost = singular.get((k, n), 0)
        runs = len(rows) + lost
        if runs == 0:
            continue
        summary.append(
            SummaryRow(
                k=k,
                n=n,
                runs=runs,
                singular=lost,
                pct_certified=100.0 * len(certified) / runs,
                pct_unverified=100.0 * len(unverified) / runs,
                avg_lambda_min=(
                    sum(covered[r.point_ref] for r in certified) / len(certified)
                    if certified
                    else None
                ),
                avg_objective=(
                    sum(r.objective for r in certified) / len(certified) if certified else None
                ),
            )
        )
    return summary


def write_summary_csv(rows: Sequence[SummaryRow], path: Union[str, Path]) -> Path:
    path = Path(path)
    atomic_write(path, _to_csv(SUMMARY_FIELDS, (row.model_dump() for row in rows)))
    return path


# =============================================================================
# CDF
# =============================================================================


def emit_cdf(records: Sequence[RunLike]) -> List[Dict]:
    """Empirical CDF of the objective per (k, n).

    Rows are sorted by objective within each group; the fraction after
    the last row of a group is 1.

    Raises:
        ValueError: If records is empty.
    """
    if not records:
        raise ValueError("emit_cdf needs at least one record")
    groups: Dict[Tuple[int, int], List[float]] = defaultdict(list)
    for record in records:
        row = _row(record)
        groups[(row.k, row.n)].append(row.objective)

    out = []
    for (k, n) in sorted(groups):
        values = sorted(groups[(k, n)])
        total = len(values)
        for i, value in enumerate(values, start=1):
            out.append({"k": k, "n": n, "objective": value, "cumulative_fraction": i / total})
    return out


def write_cdf_csv(rows: Sequence[Dict], path: Union[str, Path]) -> Path:
    path = Path(path)
    atomic_write(path, _to_csv(CDF_FIELDS, rows))
    return path
