"""End-to-end certification of a candidate point.

Stages: gradient norm -> Hessian eigenvalue bound -> third-order bound
on the alpha-ball -> radius -> differentiability of the radius ball ->
non-globality -> strictness. A refusal at any stage is reported with its
stage name and is never evidence that no minimum exists.
"""

import logging
from typing import Tuple

import numpy as np

from relucert.certify.disjoint import singular_pairs_in_ball
from relucert.certify.models import Certificate, TransferLink
from relucert.certify.radius import compute_radius, nonglobal_check
from relucert.closed_form.objective import gradient_F, hessian_F
from relucert.models.points import TargetBasis, WeightPoint
from relucert.rigor.bounds import BallSpec, hessian_norm_bound_LH, third_order_bound_LA
from relucert.rigor.eigen import eigen_lower_bound
from relucert.rigor.enclosure import DEFAULT_PRECISION, MAX_PRECISION, Enclosure
from relucert.rigor.evaluate import enclose_gradient_norm, enclose_hessian
from relucert.rigor.retry import with_precision_retry
from relucert.utils.errors import (
    CertificationRefusedError,
    IndeterminateEnclosureError,
    NotPositiveDefiniteError,
    RadiusExceedsAlphaError,
    RefusalError,
    SingularConfigurationError,
)

logger = logging.getLogger(__name__)

# alpha as a fraction of the largest neuron norm
ALPHA_FRACTION = 1e-3
ALPHA_RETRY_FACTOR = 10.0
REFINE_STEPS = 3


def _has_singular_pair(W: WeightPoint, V: TargetBasis) -> bool:
    norms = W.neuron_norms()
    if np.any(norms == 0.0):
        return True
    units = W.W / norms[:, None]
    targets = V.vectors / np.linalg.norm(V.vectors, axis=1)[:, None]
    cos_ww = units @ units.T
    np.fill_diagonal(cos_ww, 0.0)
    return bool(np.any(np.abs(cos_ww) >= 1.0) or np.any(np.abs(units @ targets.T) >= 1.0))


def refine_point(W: WeightPoint, V: TargetBasis, steps: int = REFINE_STEPS) -> WeightPoint:
    """Polish a near-critical point with float Newton steps.

    An iterate is kept only while the gradient norm keeps falling and the
    total move stays below the alpha used for certification, so points
    far from a critical point come back unchanged. Singular points are
    left for the gradient stage to refuse.
    """
    if _has_singular_pair(W, V):
        return W
    limit = ALPHA_FRACTION * float(W.neuron_norms().max())
    best = W
    try:
        best_norm = float(np.linalg.norm(gradient_F(W, V)))
        current = W.W
        for _ in range(steps):
            if best_norm == 0.0:
                break
            step = np.linalg.solve(hessian_F(current, V), gradient_F(current, V))
            current = current - step.reshape(current.shape)
            norm = float(np.linalg.norm(gradient_F(current, V)))
            if not norm < best_norm or np.linalg.norm(current - W.W) >= limit:
                break
            best, best_norm = WeightPoint(current), norm
    except (SingularConfigurationError, np.linalg.LinAlgError):
        pass
    if best is not W:
        logger.debug(
            "refined point moved %.3g, gradient %.3g", np.linalg.norm(best.W - W.W), best_norm
        )
    return best


class _Stage:
    """Context manager labelling refusals with the stage that raised them."""

    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is None or isinstance(exc, (IndeterminateEnclosureError, CertificationRefusedError)):
            return False
        if isinstance(exc, (RefusalError, SingularConfigurationError)):
            raise CertificationRefusedError(self.name, exc) from exc
        return False


def _radius_on_ball(W, V, epsilon, lambda_min, alpha, precision):
    ball = BallSpec.around(W, V, alpha, precision)
    B = third_order_bound_LA(ball, V.k, W.n).upper_float()
    return B, compute_radius(epsilon, lambda_min, B, alpha, precision)


def _certify_at(W: WeightPoint, V: TargetBasis, precision: int, point_ref: str) -> Certificate:
    alpha = ALPHA_FRACTION * float(W.neuron_norms().max())

    with _Stage("gradient"):
        epsilon = enclose_gradient_norm(W, V, precision).upper_float()

    with _Stage("eigen_bound"):
        report = eigen_lower_bound(enclose_hessian(W, V, precision), precision)
        if report.indeterminate:
            raise IndeterminateEnclosureError("enclosure width decides the eigenvalue bound")
        if not report.certified:
            raise NotPositiveDefiniteError(
                f"eigenvalue bound not positive (hint {report.lambda_hint:.6g})"
            )
    lambda_min = report.lambda_min_lower

    with _Stage("radius"):
        try:
            B, r = _radius_on_ball(W, V, epsilon, lambda_min, alpha, precision)
        except RadiusExceedsAlphaError:
            alpha *= ALPHA_RETRY_FACTOR
            logger.info("%s: radius exceeds alpha, retrying with alpha=%.3g", point_ref, alpha)
            B, r = _radius_on_ball(W, V, epsilon, lambda_min, alpha, precision)

    with _Stage("differentiability"):
        origin_ok, bad_pairs = singular_pairs_in_ball(W, V, r, precision)
        differentiable = origin_ok and not bad_pairs

    with _Stage("nonglobal"):
        result = nonglobal_check(r, epsilon, W, V, precision)
        if result.indeterminate:
            raise IndeterminateEnclosureError("non-globality inequality is unresolved")

    strict = (Enclosure.exact(lambda_min, precision) - Enclosure.exact(B, precision) * r).is_positive()

    logger.info(
        "%s: eps %.3g, lambda %.6g, B %.4g, r %.3g, margin %.6g",
        point_ref,
        epsilon,
        lambda_min,
        B,
        r,
        result.margin,
    )
    return Certificate(
        point=W,
        point_ref=point_ref,
        targets=V,
        epsilon=epsilon,
        lambda_min=lambda_min,
        B=B,
        alpha=alpha,
        r=r,
        objective_at_point=result.objective,
        margin=result.margin,
        nonglobal=result.nonglobal,
        differentiable_ball=differentiable,
        strict=strict,
        precision_bits=precision,
    )


def certify_point(
    W: WeightPoint,
    V: TargetBasis,
    precision: int = DEFAULT_PRECISION,
    max_precision: int = MAX_PRECISION,
    point_ref: str = "",
    refine: bool = True,
) -> Certificate:
    """Certify that W is close to a strict, non-global local minimum.

    With refine, W is first polished by refine_point and the certificate
    is issued for the polished point.
    Indeterminate comparisons are retried at doubled precision up to
    max_precision.

    Raises:
        CertificationRefusedError: With the failing stage and its cause.
        IndeterminateEnclosureError: If still unresolved at max_precision.
    """
    if refine:
        W = refine_point(W, V)
    return with_precision_retry(
        lambda bits: _certify_at(W, V, bits, point_ref), precision, max_precision
    )


def transfer_bounds(
    cert: Certificate, distance: float, V: TargetBasis
) -> Tuple[float, float, float]:
    """r_member, lambda_lower and objective_lower for a member within distance.

    Computed from the stored double distance, so a reloaded link
    reproduces them exactly.
    """
    p = cert.precision_bits
    delta = Enclosure.exact(distance, p)
    lh = hessian_norm_bound_LH(BallSpec.around(cert.point, V, distance, p), V.k, cert.n)
    r_member = (delta + cert.r).upper_float()
    lambda_lower = (Enclosure.exact(cert.lambda_min, p) - delta * cert.B).lower_float()
    drop = delta * (lh * delta + cert.epsilon)
    objective_lower = (cert.objective_at_point - drop).lower_float()
    return r_member, lambda_lower, objective_lower


def transfer_certificate(
    cert: Certificate,
    member_ref: str,
    aligned_member: WeightPoint,
    V: TargetBasis,
) -> TransferLink:
    """Extend a certificate to a nearby (permutation-aligned) point.

    For a member at distance delta <= alpha: the minimum lies within
    r + delta of the member, the Hessian bound drops by at most B * delta,
    and F at the member is at least F(W) - delta (LH delta + eps).

    Raises:
        RadiusExceedsAlphaError: If the member lies outside the alpha-ball.
    """
    p = cert.precision_bits
    delta = Enclosure.exact(0, p)
    for x, y in zip(aligned_member.W.ravel(), cert.point.W.ravel()):
        delta = delta + (Enclosure.exact(float(x), p) - float(y)).square()
    distance = delta.sqrt().upper_float()
    if not distance < cert.alpha:
        raise RadiusExceedsAlphaError(
            f"{member_ref} lies {distance:.3g} from the certified point, beyond alpha"
        )

    r_member, lambda_lower, objective_lower = transfer_bounds(cert, distance, V)
    link = TransferLink(
        member_ref=member_ref,
        distance=distance,
        r_member=r_member,
        lambda_lower=lambda_lower,
        objective_lower=objective_lower,
    )
    cert.transfer_chain.append(link)
    return link
