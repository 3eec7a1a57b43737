"""Certified lower bound on the smallest eigenvalue of a symmetric matrix.

A double-precision eigendecomposition A' ~ U D U^T is only a hint. The
bound is lambda_min(D) - eps1 - eps2 - eps3 where

    eps1 >= ||A - A'||_F                (enclosure of A against its midpoint)
    eps2  = ||A' - U D U^T||_F          (exact, integer arithmetic)
    eps3  = B^2 (2 lmax q + q^2),  q = 1/sqrt(1 - C) - 1
    B     = 1 + ||U - I||_F,  C = ||I - U^T U||_F  (exact)

eps3 covers replacing U by the orthogonal matrix U (U^T U)^(-1/2), which
needs U^T U diagonally dominant and C < 1. Weyl's inequality then moves
every eigenvalue by at most the sum.
"""

import logging
from dataclasses import dataclass
from math import comb
from typing import Union

import numpy as np

from relucert.rigor.dyadic import DyadicMatrix
from relucert.rigor.enclosure import DEFAULT_PRECISION, Enclosure, check_precision, upper_sqrt
from relucert.rigor.evaluate import EnclosureMatrix
from relucert.utils.errors import CEnclosureTooLargeError, NotDiagonallyDominantError

logger = logging.getLogger(__name__)

NOT_CERTIFIED = -1.0


@dataclass(frozen=True, eq=False)
class EigenBoundReport:
    """Outcome of eigen_lower_bound.

    lambda_min_lower is a double <= the true smallest eigenvalue when it
    is positive, and NOT_CERTIFIED (-1) otherwise. -1 is a refusal, never
    a proof of indefiniteness.
    """

    lambda_min_lower: float
    bound: Enclosure
    lambda_hint: float
    eps1: Enclosure
    eps2: Enclosure
    eps3: Enclosure
    B_orth: Enclosure
    C_orth: Enclosure
    dominant_ok: bool
    dimension: int

    @property
    def certified(self) -> bool:
        return self.lambda_min_lower > 0

    @property
    def indeterminate(self) -> bool:
        """True when only eps1, the enclosure width, keeps the bound from being positive.

        eps2 and eps3 come from the double eigendecomposition and do not
        shrink with precision, so a bound they decide is a plain refusal.
        """
        if self.bound.is_positive():
            return False
        rest = Enclosure.exact(self.lambda_hint, self.bound.precision) - self.eps2 - self.eps3
        return rest.is_positive()


def _as_hint(A, precision: int):
    if isinstance(A, EnclosureMatrix):
        A_hint = A.midpoint()
        eps1 = Enclosure.exact(A.distance_bound(A_hint), precision)
        return A_hint, eps1
    A_hint = np.asarray(A, dtype=np.float64)
    if A_hint.ndim != 2 or A_hint.shape[0] != A_hint.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A_hint.shape}")
    if not np.all(np.isfinite(A_hint)):
        raise ValueError("matrix has non-finite entries")
    if not np.array_equal(A_hint, A_hint.T):
        raise ValueError("matrix is not symmetric")
    return A_hint, Enclosure.exact(0, precision)


def eigen_lower_bound(
    A: Union[np.ndarray, EnclosureMatrix],
    precision: int = DEFAULT_PRECISION,
) -> EigenBoundReport:
    """Certified lower bound on lambda_min(A), or -1.

    Args:
        A: A symmetric double matrix (taken as exact) or an EnclosureMatrix.
        precision: Bits used for the final scalar enclosures.

    Raises:
        NotDiagonallyDominantError: If U^T U is not diagonally dominant.
        CEnclosureTooLargeError: If ||I - U^T U||_F >= 1.
    """
    precision = check_precision(precision)
    A_hint, eps1 = _as_hint(A, precision)
    size = A_hint.shape[0]

    D, U = np.linalg.eigh(A_hint)

    Ad = DyadicMatrix.from_float(A_hint)
    Ud = DyadicMatrix.from_float(U)
    Dd = DyadicMatrix.from_float(D)
    eye = DyadicMatrix.identity(size)

    residual = Ad - Ud.scale_columns(Dd) @ Ud.T
    eps2 = Enclosure.exact(upper_sqrt(*residual.frobenius_sq(), precision), precision)

    gram = Ud.T @ Ud
    dominant = gram.diagonally_dominant()
    if not dominant:
        raise NotDiagonallyDominantError(
            f"U^T U of the {size}x{size} eigenvector hint is not diagonally dominant"
        )
    C = Enclosure.exact(upper_sqrt(*(eye - gram).frobenius_sq(), precision), precision)
    if C.hi >= 1:
        raise CEnclosureTooLargeError(f"||I - U^T U||_F bound {float(C.hi):.3g} is not below 1")
    B = Enclosure.exact(upper_sqrt(*(Ud - eye).frobenius_sq(), precision), precision) + 1

    q = 1 / (1 - C).sqrt() - 1
    q = Enclosure.exact(q.hi, precision)
    lmax = Enclosure.exact(float(np.max(np.abs(D))), precision) + eps1 + eps2
    eps3 = Enclosure.exact((B.square() * (2 * lmax * q + q.square())).hi, precision)

    lambda_hint = float(D[0])
    bound = Enclosure.exact(lambda_hint, precision) - eps1 - eps2 - eps3
    lower = bound.lower_float() if bound.is_positive() else NOT_CERTIFIED

    logger.debug(
        "eigen bound %dx%d: hint %.6g, eps1 %.3g, eps2 %.3g, eps3 %.3g -> %.6g",
        size,
        size,
        lambda_hint,
        float(eps1.hi),
        float(eps2.hi),
        float(eps3.hi),
        lower,
    )

    return EigenBoundReport(
        lambda_min_lower=lower,
        bound=bound,
        lambda_hint=lambda_hint,
        eps1=eps1,
        eps2=eps2,
        eps3=eps3,
        B_orth=B,
        C_orth=C,
        dominant_ok=dominant,
        dimension=size,
    )


def central_binomial_identity_check(n_max: int) -> bool:
    """Check sum_k C(2k,k) C(2n-2k,n-k) == 4^n exactly for all n <= n_max."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    for n in range(n_max + 1):
        total = sum(comb(2 * k, k) * comb(2 * (n - k), n - k) for k in range(n + 1))
        if total != 4**n:
            return False
    return True
