"""Run a full search-and-certify experiment.

For every (k, n): run the descent instantiations, label them, group the
candidates into permutation classes, certify one member per class and
transfer its certificate to the rest. Work fans out over a process pool;
results are consumed in run-index order, so the pool size never changes
what is written.
"""

import logging
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from relucert.certify.models import Certificate
from relucert.certify.pipeline import certify_point, transfer_certificate
from relucert.harness.models import ExperimentSpec, SummaryRow
from relucert.harness.store import save_candidate, save_certificate
from relucert.harness.tables import (
    emit_cdf,
    summarize,
    write_cdf_csv,
    write_runs_csv,
    write_summary_csv,
)
from relucert.models.points import TargetBasis
from relucert.models.records import Classification, GDConfig, RunRecord
from relucert.rigor.enclosure import MAX_PRECISION
from relucert.search.canonical import align_to
from relucert.search.cluster import dedup_cluster
from relucert.search.descent import gd_run, run_seed
from relucert.utils.errors import (
    IndeterminateEnclosureError,
    RadiusExceedsAlphaError,
    RefusalError,
    SingularEncounterError,
)

logger = logging.getLogger(__name__)

# members of a class tried before the whole class counts as unverified
CERT_ATTEMPTS = 3

ProgressCallback = Callable[[str, int], None]


@dataclass
class ExperimentResult:
    """Everything run_experiment produced, in deterministic order."""

    summary: List[SummaryRow] = field(default_factory=list)
    records: List[RunRecord] = field(default_factory=list)
    certificates: List[Certificate] = field(default_factory=list)
    refusals: List[Tuple[str, str]] = field(default_factory=list)
    singular_runs: List[str] = field(default_factory=list)
    singular_counts: Dict[Tuple[int, int], int] = field(default_factory=dict)


def _run_one(config: GDConfig) -> Union[RunRecord, str]:
    try:
        return gd_run(config, TargetBasis.standard(config.k))
    except SingularEncounterError as e:
        return str(e)


def _certify_one(args: Tuple[RunRecord, int]) -> Union[Certificate, str]:
    # exceptions are returned as text; several carry non-picklable state
    record, precision = args
    try:
        return certify_point(
            record.terminal,
            TargetBasis.standard(record.config.k),
            precision,
            MAX_PRECISION,
            point_ref=record.point_ref,
        )
    except (RefusalError, IndeterminateEnclosureError) as e:
        return f"{type(e).__name__}: {e}"


def run_descents(
    spec: ExperimentSpec,
    k: int,
    n: int,
    executor: Optional[Executor] = None,
) -> Tuple[List[RunRecord], List[str]]:
    """All descent runs of one configuration, in run-index order.

    Returns:
        (records, singular) where singular holds messages of runs that hit
        a zero neuron and produced no record.
    """
    configs = [
        GDConfig(
            k=k,
            n=n,
            seed=run_seed(spec.base_seed, i),
            step_size=spec.step_size,
            grad_tol=spec.grad_tol,
            max_iters=spec.max_iters,
        )
        for i in range(spec.runs_per_config)
    ]
    mapper = executor.map if executor is not None else map
    records, singular = [], []
    for outcome in mapper(_run_one, configs):
        if isinstance(outcome, str):
            logger.warning(outcome)
            singular.append(outcome)
        else:
            records.append(outcome)
    return records, singular


def certify_classes(
    records: Sequence[RunRecord],
    spec: ExperimentSpec,
    executor: Optional[Executor] = None,
) -> Tuple[List[Certificate], List[Tuple[str, str]]]:
    """Certify one member per candidate class and transfer to the others.

    Up to CERT_ATTEMPTS members of a class are tried in order. Members too
    far from the certified point for a transfer are certified on their own.
    """
    candidates = [r for r in records if r.classification is Classification.CANDIDATE]
    if not candidates:
        return [], []
    classes = dedup_cluster(candidates, spec.dedup_threshold)
    mapper = executor.map if executor is not None else map

    certificates: List[Certificate] = []
    refusals: List[Tuple[str, str]] = []
    pending = [list(cls.members) for cls in classes]
    while pending:
        heads = [members[: CERT_ATTEMPTS] for members in pending]
        jobs = [(m, spec.precision_bits) for head in heads for m in head]
        outcomes = iter(list(mapper(_certify_one, jobs)))
        next_pending = []
        for members, head in zip(pending, heads):
            results = [next(outcomes) for _ in head]
            cert_idx = next(
                (i for i, res in enumerate(results) if isinstance(res, Certificate)), None
            )
            for member, res in zip(head, results):
                if isinstance(res, str):
                    refusals.append((member.point_ref, res))
                    logger.info("%s: refused (%s)", member.point_ref, res)
            if cert_idx is None:
                continue
            cert = results[cert_idx]
            certificates.append(cert)
            V = TargetBasis.standard(cert.k)
            refused = [m for m, res in zip(head, results) if isinstance(res, str)]
            stragglers = []
            for member in members:
                if member is head[cert_idx]:
                    continue
                aligned, _ = align_to(cert.point, member.terminal)
                try:
                    transfer_certificate(cert, member.point_ref, aligned, V)
                except RadiusExceedsAlphaError:
                    if not any(member is m for m in refused):
                        stragglers.append(member)
            if stragglers:
                next_pending.append(stragglers)
        pending = next_pending
    return certificates, refusals


def write_artifacts(result: ExperimentResult, output_dir: Path) -> None:
    """Candidate and certificate files plus the three CSV tables."""
    for record in result.records:
        if record.classification in (Classification.CANDIDATE, Classification.ANOMALY):
            save_candidate(record, output_dir / "candidates" / f"{record.point_ref}.json")
    for cert in result.certificates:
        save_certificate(cert, output_dir / "certificates" / f"{cert.point_ref}.json")
    write_runs_csv(result.records, output_dir / "runs.csv")
    write_summary_csv(result.summary, output_dir / "summary.csv")
    if result.records:
        write_cdf_csv(emit_cdf(result.records), output_dir / "cdf.csv")


def run_experiment(
    spec: ExperimentSpec,
    progress: Optional[ProgressCallback] = None,
    executor: Optional[Executor] = None,
) -> ExperimentResult:
    """Run every configuration of spec and write its artifacts.

    Refusals never abort the experiment; they are collected in the
    result and the affected candidates count as unverified.

    Args:
        spec: Validated experiment configuration.
        progress: Called with a stage label and an item count as work finishes.
        executor: Pool to use; a ProcessPoolExecutor of spec.workers is
            created when omitted.
    """
    result = ExperimentResult()
    owned = executor is None
    pool = ProcessPoolExecutor(max_workers=spec.workers) if owned else executor
    try:
        for k, n in spec.configurations():
            records, singular = run_descents(spec, k, n, pool)
            if progress:
                progress(f"k={k} n={n} descent", len(records) + len(singular))
            certificates, refusals = certify_classes(records, spec, pool)
            if progress:
                progress(f"k={k} n={n} certify", len(certificates) + len(refusals))
            result.records.extend(records)
            result.singular_runs.extend(singular)
            if singular:
                result.singular_counts[(k, n)] = len(singular)
            result.certificates.extend(certificates)
            result.refusals.extend(refusals)
            logger.info(
                "k=%d n=%d: %d runs, %d certificates, %d refusals",
                k,
                n,
                len(records),
                len(certificates),
                len(refusals),
            )
    finally:
        if owned:
            pool.shutdown()

    result.summary = summarize(result.records, result.certificates, result.singular_counts)
    write_artifacts(result, Path(spec.output_dir))
    return result

