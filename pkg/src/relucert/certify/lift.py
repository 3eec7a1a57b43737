"""Lifting a certificate to input dimensions k + m by zero padding.

Padding every neuron and target with m zero coordinates leaves all norms
and angles unchanged. The padded Hessian is the original Hessian plus m
copies of the n x n matrix M acting on the new coordinates.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from relucert.certify.models import Certificate, LiftReport
from relucert.closed_form.kernels import TWO_PI, pair_geometry
from relucert.closed_form.objective import _as_arrays, hessian_F
from relucert.models.points import TargetBasis, WeightPoint
from relucert.rigor.eigen import eigen_lower_bound
from relucert.rigor.evaluate import enclose_hessian
from relucert.rigor.retry import with_precision_retry
from relucert.utils.errors import IndeterminateEnclosureError

logger = logging.getLogger(__name__)

M_NOTE = (
    "The padded Hessian is block diagonal with the original Hessian and m "
    "copies of M, and norms are unchanged by padding, so epsilon, B, r and "
    "the margin certify the padded point for every m >= 1."
)


def build_M(W, V) -> np.ndarray:
    """The n x n matrix governing the padded coordinates.

    M_ii = 1/2 + sum_{l != i} sin(theta_il) ||w_l|| / (2 pi ||w_i||)
               - sum_l sin(theta(w_i, v_l)) ||v_l|| / (2 pi ||w_i||)
    M_ij = (pi - theta_ij) / (2 pi)
    """
    Wm, Vm = _as_arrays(W, V)
    n = Wm.shape[0]
    M = np.zeros((n, n))
    for i in range(n):
        w_norm = float(np.linalg.norm(Wm[i]))
        diag = 0.5
        for l in range(n):
            if l == i:
                continue
            geo = pair_geometry(Wm[i], Wm[l])
            diag += geo.sin_theta * geo.v_norm / (TWO_PI * w_norm)
            if l > i:
                M[i, l] = M[l, i] = (np.pi - geo.theta) / TWO_PI
        for l in range(Vm.shape[0]):
            geo = pair_geometry(Wm[i], Vm[l])
            diag -= geo.sin_theta * geo.v_norm / (TWO_PI * w_norm)
        M[i, i] = diag
    return M


def padded_point(W, V, m: int) -> Tuple[WeightPoint, TargetBasis]:
    """W and V with m zero coordinates appended to every row."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    Wm, Vm = _as_arrays(W, V)
    Wp = np.hstack([Wm, np.zeros((Wm.shape[0], m))])
    Vp = np.hstack([Vm, np.zeros((Vm.shape[0], m))])
    return WeightPoint(Wp), TargetBasis(Vp)


def padded_hessian(W, V, m: int) -> np.ndarray:
    """Float Hessian of the padded problem."""
    Wp, Vp = padded_point(W, V, m)
    return hessian_F(Wp, Vp)


def lift_certificate(cert: Certificate, V: Optional[TargetBasis] = None) -> LiftReport:
    """Certify the zero-padded point (m = 1) and record the m-independence.

    Raises:
        CertificationRefusedError: Propagated from the rigorous Hessian.
    """
    V = V if V is not None else cert.targets
    Wp, Vp = padded_point(cert.point, V, 1)

    def bound(bits: int):
        report = eigen_lower_bound(enclose_hessian(Wp, Vp, bits), bits)
        if report.indeterminate:
            raise IndeterminateEnclosureError("enclosure width decides the padded eigenvalue bound")
        return report

    report = with_precision_retry(bound, cert.precision_bits)
    M = build_M(cert.point, V)
    spectrum = [float(x) for x in np.linalg.eigvalsh(M)]
    certified = report.certified and cert.is_certified
    logger.info(
        "%s: lifted bound %.6g (original %.6g), min eig(M) %.6g",
        cert.point_ref,
        report.lambda_min_lower,
        cert.lambda_min,
        spectrum[0],
    )
    return LiftReport(
        point_ref=cert.point_ref,
        M=M,
        spectrum_M=spectrum,
        lambda_min_lower=report.lambda_min_lower,
        lift_certified=certified,
        m_note=M_NOTE,
    )
