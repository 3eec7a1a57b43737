"""Certification of candidate points and lifting to higher dimensions."""

from relucert.certify.disjoint import (
    DisjointnessReport,
    ball_disjointness_check,
    singular_pairs_in_ball,
)
from relucert.certify.lift import build_M, lift_certificate, padded_hessian, padded_point
from relucert.certify.models import Certificate, LiftReport, TransferLink
from relucert.certify.pipeline import (
    ALPHA_FRACTION,
    certify_point,
    refine_point,
    transfer_bounds,
    transfer_certificate,
)
from relucert.certify.radius import NonGlobalResult, compute_radius, nonglobal_check

__all__ = [
    "ALPHA_FRACTION",
    "Certificate",
    "DisjointnessReport",
    "LiftReport",
    "NonGlobalResult",
    "TransferLink",
    "ball_disjointness_check",
    "build_M",
    "certify_point",
    "compute_radius",
    "lift_certificate",
    "nonglobal_check",
    "padded_hessian",
    "padded_point",
    "refine_point",
    "singular_pairs_in_ball",
    "transfer_bounds",
    "transfer_certificate",
]
