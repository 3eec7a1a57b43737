"""Reading and writing candidate and certificate files.

Writes go through a temporary file and an atomic replace. Certificates
are re-validated when loaded: every quantity derived from the stored
inputs is recomputed and must agree with what the file claims.
"""

import json
import logging
from pathlib import Path
from typing import Union

from pydantic import ValidationError

from relucert.certify.disjoint import singular_pairs_in_ball
from relucert.certify.models import Certificate, LiftReport, TransferLink
from relucert.certify.pipeline import transfer_bounds
from relucert.certify.radius import compute_radius, nonglobal_check
from relucert.harness.models import (
    CANDIDATE_SCHEMA,
    CERTIFICATE_SCHEMA,
    CandidateFile,
    CertificateFile,
    LiftReportFile,
    TransferLinkFile,
)
from relucert.models.points import TargetBasis, WeightPoint
from relucert.models.records import Classification, GDConfig, RunRecord, classify
from relucert.rigor.bounds import BallSpec, third_order_bound_LA
from relucert.rigor.eigen import eigen_lower_bound
from relucert.rigor.enclosure import Enclosure
from relucert.rigor.evaluate import enclose_gradient_norm, enclose_hessian
from relucert.utils.errors import (
    InvariantViolationOnLoadError,
    RefusalError,
    SchemaMismatchError,
    SingularConfigurationError,
)

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def atomic_write(path: Path, content: str) -> None:
    """Write content to path through a temporary sibling file."""
    path.parent.mkdir(parents=True, exist_ok=True)
    temp_path = path.with_suffix(path.suffix + ".tmp")
    with open(temp_path, "w", encoding="utf-8") as f:
        f.write(content)
        f.write("\n")
    temp_path.replace(path)


def _read(path: Path, expected_schema: str) -> dict:
    with open(path, encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise SchemaMismatchError(f"{path}: not valid JSON ({e})") from e
    if not isinstance(data, dict):
        raise SchemaMismatchError(f"{path}: expected a JSON object")
    found = data.get("schema")
    if found != expected_schema:
        raise SchemaMismatchError(f"{path}: schema {found!r}, expected {expected_schema!r}")
    return data


# =============================================================================
# Candidates
# =============================================================================


def candidate_to_file(record: RunRecord) -> CandidateFile:
    cfg = record.config
    return CandidateFile(
        k=cfg.k,
        n=cfg.n,
        seed=cfg.seed,
        step_size=cfg.step_size,
        grad_tol=cfg.grad_tol,
        max_iters=cfg.max_iters,
        iterations=record.iterations,
        objective=record.objective,
        grad_norm=record.grad_norm,
        classification=record.classification.value,
        descent_violations=record.descent_violations,
        W=record.terminal.W.tolist(),
    )


def save_candidate(record: RunRecord, path: PathLike) -> Path:
    """Write a run record as a candidate/1 file."""
    path = Path(path)
    atomic_write(path, candidate_to_file(record).to_json())
    return path


def _parse_candidate(path: Path) -> CandidateFile:
    data = _read(path, CANDIDATE_SCHEMA)
    try:
        stored = CandidateFile.model_validate(data)
    except ValidationError as e:
        raise SchemaMismatchError(f"{path}: {e}") from e
    try:
        point = WeightPoint.from_rows(stored.W)
    except ValueError as e:
        raise SchemaMismatchError(f"{path}: {e}") from e
    if point.n != stored.n or point.d != stored.k:
        raise SchemaMismatchError(f"{path}: W does not have shape ({stored.n}, {stored.k})")
    return stored


def load_point(path: PathLike) -> WeightPoint:
    """The weight matrix of a candidate file, with or without run data."""
    path = Path(path)
    return WeightPoint.from_rows(_parse_candidate(path).W)


def load_candidate(path: PathLike) -> RunRecord:
    """Read a candidate/1 file back into a RunRecord.

    Raises:
        SchemaMismatchError: Wrong schema tag, invalid fields, or a file
            without objective and grad_norm (a bare starting point).
    """
    path = Path(path)
    stored = _parse_candidate(path)
    if stored.objective is None or stored.grad_norm is None:
        raise SchemaMismatchError(f"{path}: holds a starting point, not a descent result")
    config = GDConfig(
        k=stored.k,
        n=stored.n,
        seed=stored.seed,
        step_size=stored.step_size,
        grad_tol=stored.grad_tol,
        max_iters=stored.max_iters,
    )
    converged = stored.grad_norm <= stored.grad_tol
    label = (
        Classification(stored.classification)
        if stored.classification
        else classify(stored.objective, converged)
    )
    return RunRecord(
        config=config,
        terminal=WeightPoint.from_rows(stored.W),
        iterations=stored.iterations,
        objective=stored.objective,
        grad_norm=stored.grad_norm,
        classification=label,
        descent_violations=stored.descent_violations,
    )


# =============================================================================
# Certificates
# =============================================================================


def certificate_to_file(cert: Certificate) -> CertificateFile:
    return CertificateFile(
        point_ref=cert.point_ref,
        epsilon=cert.epsilon,
        lambda_min=cert.lambda_min,
        B=cert.B,
        alpha=cert.alpha,
        r=cert.r,
        margin=cert.margin,
        objective_lo=cert.objective_at_point.lower_float(),
        objective_hi=cert.objective_at_point.upper_float(),
        nonglobal=cert.nonglobal,
        differentiable_ball=cert.differentiable_ball,
        strict=cert.strict,
        precision_bits=cert.precision_bits,
        transfer_chain=[
            TransferLinkFile(
                member_ref=link.member_ref,
                distance=link.distance,
                r_member=link.r_member,
                lambda_lower=link.lambda_lower,
                objective_lower=link.objective_lower,
            )
            for link in cert.transfer_chain
        ],
        W=cert.point.W.tolist(),
        V=cert.targets.vectors.tolist(),
    )


def save_certificate(cert: Certificate, path: PathLike) -> Path:
    """Write a certificate as a certificate/1 file."""
    path = Path(path)
    atomic_write(path, certificate_to_file(cert).to_json())
    return path


def _violation(path: Path, what: str) -> InvariantViolationOnLoadError:
    return InvariantViolationOnLoadError(f"{path}: {what}")


def revalidate(cert: Certificate, full: bool = False, source: str = "") -> None:
    """Recompute everything the certificate derives from its inputs.

    B, r, the margin, differentiability and strictness are recomputed
    from the stored point, targets, epsilon, lambda_min and alpha. With
    full=True epsilon and lambda_min are re-derived as well.

    Raises:
        InvariantViolationOnLoadError: On any disagreement.
    """
    where = Path(source or cert.point_ref)
    W, V, p = cert.point, cert.targets, cert.precision_bits
    try:
        if full:
            eps = enclose_gradient_norm(W, V, p).upper_float()
            if cert.epsilon < eps:
                raise _violation(where, f"epsilon {cert.epsilon!r} is below the gradient norm bound {eps!r}")
            lam = eigen_lower_bound(enclose_hessian(W, V, p), p).lambda_min_lower
            if cert.lambda_min > lam:
                raise _violation(where, f"lambda_min {cert.lambda_min!r} exceeds the recomputed bound {lam!r}")

        B = third_order_bound_LA(BallSpec.around(W, V, cert.alpha, p), V.k, W.n).upper_float()
        if B != cert.B:
            raise _violation(where, f"B is {cert.B!r}, recomputed {B!r}")
        r = compute_radius(cert.epsilon, cert.lambda_min, cert.B, cert.alpha, p)
        if r != cert.r:
            raise _violation(where, f"r is {cert.r!r}, recomputed {r!r}")

        result = nonglobal_check(cert.r, cert.epsilon, W, V, p)
        stored_obj = cert.objective_at_point
        if stored_obj.lo != result.objective.lo or stored_obj.hi != result.objective.hi:
            raise _violation(where, "stored objective enclosure disagrees with the point")
        if cert.margin > result.margin or cert.nonglobal != result.nonglobal:
            raise _violation(where, f"margin {cert.margin!r} not supported (recomputed {result.margin!r})")

        origin_ok, bad = singular_pairs_in_ball(W, V, cert.r, p)
        if cert.differentiable_ball and not (origin_ok and not bad):
            raise _violation(where, "ball is claimed differentiable but reaches a singular set")

        strict = (Enclosure.exact(cert.lambda_min, p) - Enclosure.exact(cert.B, p) * cert.r).is_positive()
        if cert.strict and not strict:
            raise _violation(where, "strictness claimed but lambda_min - B r is not positive")

        for link in cert.transfer_chain:
            if not link.distance < cert.alpha:
                raise _violation(where, f"transfer to {link.member_ref} is outside the alpha-ball")
            r_member, lambda_lower, objective_lower = transfer_bounds(cert, link.distance, V)
            if link.r_member < r_member:
                raise _violation(where, f"transfer to {link.member_ref}: r_member {link.r_member!r} below {r_member!r}")
            if link.lambda_lower > lambda_lower:
                raise _violation(
                    where,
                    f"transfer to {link.member_ref}: lambda_lower {link.lambda_lower!r} exceeds {lambda_lower!r}",
                )
            if link.objective_lower > objective_lower:
                raise _violation(
                    where,
                    f"transfer to {link.member_ref}: objective_lower {link.objective_lower!r} exceeds {objective_lower!r}",
                )
    except (RefusalError, SingularConfigurationError, ValueError) as e:
        raise _violation(where, f"re-validation refused: {e}") from e


def load_certificate(path: PathLike, full: bool = False) -> Certificate:
    """Read and re-validate a certificate/1 file.

    Raises:
        SchemaMismatchError: Wrong schema tag or invalid fields.
        InvariantViolationOnLoadError: If re-validation disagrees with the file.
    """
    path = Path(path)
    data = _read(path, CERTIFICATE_SCHEMA)
    try:
        stored = CertificateFile.model_validate(data)
    except ValidationError as e:
        raise SchemaMismatchError(f"{path}: {e}") from e

    try:
        point = WeightPoint.from_rows(stored.W)
        targets = TargetBasis(stored.V)
    except ValueError as e:
        raise SchemaMismatchError(f"{path}: {e}") from e
    if point.d != targets.d:
        raise SchemaMismatchError(f"{path}: W and V have different input dimensions")

    cert = Certificate(
        point=point,
        point_ref=stored.point_ref,
        targets=targets,
        epsilon=stored.epsilon,
        lambda_min=stored.lambda_min,
        B=stored.B,
        alpha=stored.alpha,
        r=stored.r,
        objective_at_point=Enclosure.hull(stored.objective_lo, stored.objective_hi, stored.precision_bits),
        margin=stored.margin,
        nonglobal=stored.nonglobal,
        differentiable_ball=stored.differentiable_ball,
        strict=stored.strict,
        precision_bits=stored.precision_bits,
        transfer_chain=[
            TransferLink(
                member_ref=link.member_ref,
                distance=link.distance,
                r_member=link.r_member,
                lambda_lower=link.lambda_lower,
                objective_lower=link.objective_lower,
            )
            for link in stored.transfer_chain
        ],
    )
    revalidate(cert, full=full, source=str(path))
    logger.debug("%s: certificate re-validated", path)
    return cert


def save_lift_report(report: LiftReport, path: PathLike) -> Path:
    """Write a lift report as a lift/1 file."""
    path = Path(path)
    stored = LiftReportFile(
        point_ref=report.point_ref,
        lambda_min_lower=report.lambda_min_lower,
        lift_certified=report.lift_certified,
        spectrum_M=report.spectrum_M,
        M=report.M.tolist(),
        m_note=report.m_note,
    )
    atomic_write(path, stored.to_json())
    return path
