"""Radius of the ball holding a local minimum, and the non-globality test."""

from dataclasses import dataclass

from relucert.models.points import TargetBasis, WeightPoint
from relucert.rigor.bounds import BallSpec, hessian_norm_bound_LH
from relucert.rigor.enclosure import DEFAULT_PRECISION, Enclosure
from relucert.rigor.evaluate import enclose_objective, norm_bounds
from relucert.utils.errors import (
    BallContainsOriginError,
    DiscriminantNegativeError,
    IndeterminateEnclosureError,
    RadiusExceedsAlphaError,
)


def compute_radius(
    epsilon: float,
    lambda_min: float,
    B: float,
    alpha: float,
    precision: int = DEFAULT_PRECISION,
) -> float:
    """Upper bound on r = (3 lambda - sqrt(9 lambda^2 - 25 B eps)) / (2 B).

    Evaluated as 25 eps / (2 (3 lambda + sqrt(disc))), the same value
    without cancellation; B = 0 is its limit.

    Raises:
        DiscriminantNegativeError: If 9 lambda^2 - 25 B eps < 0.
        RadiusExceedsAlphaError: If r is not below alpha.
        IndeterminateEnclosureError: If the discriminant's sign is unresolved.
    """
    if epsilon < 0 or B < 0:
        raise ValueError("epsilon and B must be nonnegative")
    if lambda_min <= 0 or alpha <= 0:
        raise ValueError("lambda_min and alpha must be positive")

    eps = Enclosure.exact(epsilon, precision)
    lam = Enclosure.exact(lambda_min, precision)
    b = Enclosure.exact(B, precision)

    disc = lam.square() * 9 - b * eps * 25
    if disc.hi < 0:
        raise DiscriminantNegativeError(
            f"9*{lambda_min:.6g}^2 < 25*{B:.6g}*{epsilon:.6g}"
        )
    if disc.lo < 0:
        raise IndeterminateEnclosureError("discriminant enclosure straddles zero")

    r = eps * 25 / ((lam * 3 + disc.sqrt()) * 2)
    r_upper = r.upper_float()
    if r_upper >= alpha:
        raise RadiusExceedsAlphaError(f"r = {r_upper:.6g} is not below alpha = {alpha:.6g}")
    return r_upper


@dataclass(frozen=True, eq=False)
class NonGlobalResult:
    """Both sides of the non-globality inequality.

    margin is a certified lower bound on F over the radius-r ball.
    objective is widened to doubles; exact_objective is the enclosure at
    the working precision.
    """

    nonglobal: bool
    margin: float
    objective: Enclosure
    rhs: Enclosure
    exact_objective: Enclosure

    @property
    def indeterminate(self) -> bool:
        """True when the precision-dependent enclosure straddles the right side."""
        if self.nonglobal:
            return False
        diff = self.exact_objective - self.rhs
        return bool(diff.lo <= 0 < diff.hi)


def nonglobal_check(
    r: float,
    epsilon: float,
    W: WeightPoint,
    V: TargetBasis,
    precision: int = DEFAULT_PRECISION,
) -> NonGlobalResult:
    """Test F(W) > r^2 LH(r) + r eps with enclosures.

    LH(r) is the Hessian norm bound on the radius-r ball, so the right
    side bounds how far F can drop within the ball.

    Raises:
        BallContainsOriginError: If r >= min_i ||w_i||.
    """
    norms = norm_bounds(W.W, precision)
    w_min = norms[0]
    for e in norms[1:]:
        w_min = w_min.min(e)
    if not w_min.lo > r:
        raise BallContainsOriginError(
            f"radius {r:.6g} reaches a neuron of norm {float(w_min.lo):.6g}"
        )

    ball = BallSpec.around(W, V, r, precision)
    lh = hessian_norm_bound_LH(ball, V.k, W.n)
    r_enc = Enclosure.exact(r, precision)
    rhs = r_enc.square() * lh + r_enc * epsilon
    # widened to doubles so a stored certificate reproduces the margin exactly
    exact = enclose_objective(W, V, precision)
    objective = Enclosure.hull(exact.lower_float(), exact.upper_float(), precision)
    diff = objective - rhs
    return NonGlobalResult(
        nonglobal=diff.is_positive(),
        margin=diff.lower_float(),
        objective=objective,
        rhs=rhs,
        exact_objective=exact,
    )
