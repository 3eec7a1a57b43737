"""Rigorous arithmetic and the certified bounds built on it."""

from relucert.rigor.bounds import BallSpec, hessian_norm_bound_LH, third_order_bound_LA
from relucert.rigor.eigen import (
    NOT_CERTIFIED,
    EigenBoundReport,
    central_binomial_identity_check,
    eigen_lower_bound,
)
from relucert.rigor.enclosure import (
    DEFAULT_PRECISION,
    MAX_PRECISION,
    Enclosure,
    pi_enclosure,
)
from relucert.rigor.evaluate import (
    EnclosureMatrix,
    enclose_gradient,
    enclose_gradient_norm,
    enclose_hessian,
    enclose_objective,
    float_matrix_enclosure,
)
from relucert.rigor.retry import precision_schedule, with_precision_retry

__all__ = [
    "DEFAULT_PRECISION",
    "MAX_PRECISION",
    "NOT_CERTIFIED",
    "BallSpec",
    "EigenBoundReport",
    "Enclosure",
    "EnclosureMatrix",
    "central_binomial_identity_check",
    "eigen_lower_bound",
    "enclose_gradient",
    "enclose_gradient_norm",
    "enclose_hessian",
    "enclose_objective",
    "float_matrix_enclosure",
    "hessian_norm_bound_LH",
    "pi_enclosure",
    "precision_schedule",
    "third_order_bound_LA",
    "with_precision_retry",
]
