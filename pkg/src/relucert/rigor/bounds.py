"""Uniform bounds on the Hessian over a ball around a point.

Both bounds depend only on the smallest and largest neuron norm that can
occur in the ball and on the largest target norm.
"""

from dataclasses import dataclass

from relucert.models.points import TargetBasis, WeightPoint
from relucert.rigor.enclosure import DEFAULT_PRECISION, Enclosure, pi_enclosure
from relucert.rigor.evaluate import norm_bounds
from relucert.utils.errors import DegenerateBallError


@dataclass(frozen=True, eq=False)
class BallSpec:
    """The ball of radius alpha around center, with norm enclosures.

    w_min/w_max enclose min_i ||w_i|| - alpha and max_i ||w_i|| + alpha,
    which bound every neuron norm inside the ball.
    """

    center: WeightPoint
    alpha: float
    w_min: Enclosure
    w_max: Enclosure
    v_max: Enclosure

    @classmethod
    def around(
        cls,
        center: WeightPoint,
        V: TargetBasis,
        alpha: float,
        precision: int = DEFAULT_PRECISION,
    ) -> "BallSpec":
        """Ball of radius alpha; alpha may be 0 for bounds at the point itself.

        Raises:
            DegenerateBallError: If the ball may contain a zero neuron.
        """
        if alpha < 0:
            raise ValueError("alpha must be nonnegative")
        norms = norm_bounds(center.W, precision)
        lo = norms[0]
        hi = norms[0]
        for e in norms[1:]:
            lo = lo.min(e)
            hi = hi.max(e)
        v_norms = norm_bounds(V.vectors, precision)
        v_max = v_norms[0]
        for e in v_norms[1:]:
            v_max = v_max.max(e)
        w_min = lo - alpha
        if not w_min.is_positive():
            raise DegenerateBallError(
                f"ball of radius {alpha:.3g} may contain a zero neuron"
            )
        return cls(center=center, alpha=alpha, w_min=w_min, w_max=hi + alpha, v_max=v_max)

    @classmethod
    def from_norms(
        cls,
        center: WeightPoint,
        alpha: float,
        w_min: float,
        w_max: float,
        v_max: float,
        precision: int = DEFAULT_PRECISION,
    ) -> "BallSpec":
        """Ball described directly by its norm bounds."""
        ball = cls(
            center=center,
            alpha=alpha,
            w_min=Enclosure.exact(w_min, precision),
            w_max=Enclosure.exact(w_max, precision),
            v_max=Enclosure.exact(v_max, precision),
        )
        if not ball.w_min.is_positive():
            raise DegenerateBallError("w_min must be positive")
        return ball


def _check(ball: BallSpec) -> None:
    if not ball.w_min.is_positive():
        raise DegenerateBallError("w_min enclosure touches zero")


def third_order_bound_LA(ball: BallSpec, k: int, n: int) -> Enclosure:
    """Lipschitz constant of the Hessian (third-derivative bound) on the ball.

    L_A = n / (pi w_min^2) * (sqrt(2) (n - 1) (w_max + w_min) + k v_max)
    """
    _check(ball)
    p = ball.w_min.precision
    pi = pi_enclosure(p)
    sqrt2 = Enclosure.exact(2, p).sqrt()
    inner = sqrt2 * (n - 1) * (ball.w_max + ball.w_min) + ball.v_max * k
    return inner * n / (pi * ball.w_min.square())


def hessian_norm_bound_LH(ball: BallSpec, k: int, n: int) -> Enclosure:
    """Upper bound on the Hessian spectral norm over the ball.

    LH = 1/2 + n (n - 1) (w_max / (2 pi w_min) + 1/2) + n k v_max / (2 pi w_min)
    """
    _check(ball)
    p = ball.w_min.precision
    two_pi = pi_enclosure(p) * 2
    half = Enclosure.exact(0.5, p)
    return (
        half
        + (ball.w_max / (two_pi * ball.w_min) + half) * (n * (n - 1))
        + ball.v_max * (n * k) / (two_pi * ball.w_min)
    )
