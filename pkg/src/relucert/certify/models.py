"""Certificates and lift reports.

- TransferLink: a class member covered by its representative's certificate
- Certificate: everything needed to re-check a certified local minimum
- LiftReport: the zero-padded version of a certificate
"""

from dataclasses import dataclass, field
from typing import List

import numpy as np

from relucert.models.points import TargetBasis, WeightPoint
from relucert.rigor.enclosure import Enclosure


@dataclass(frozen=True)
class TransferLink:
    """A permuted copy of member_ref lies at `distance` from the certified point.

    The member is then within r_member of a local minimum whose Hessian
    has smallest eigenvalue at least lambda_lower, and F at the member is
    at least objective_lower.
    """

    member_ref: str
    distance: float
    r_member: float
    lambda_lower: float
    objective_lower: float


@dataclass(eq=False)
class Certificate:
    """Certified statement about the point W.

    If nonglobal and differentiable_ball hold, there is a local minimum
    within distance r of W, F exceeds margin on the radius-r ball, and
    margin > 0 so that minimum is not global.
    """

    point: WeightPoint
    point_ref: str
    targets: TargetBasis
    epsilon: float
    lambda_min: float
    B: float
    alpha: float
    r: float
    objective_at_point: Enclosure
    margin: float
    nonglobal: bool
    differentiable_ball: bool
    strict: bool
    precision_bits: int
    transfer_chain: List[TransferLink] = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.point.n

    @property
    def k(self) -> int:
        return self.targets.k

    @property
    def objective_lower_in_ball(self) -> float:
        return self.margin

    @property
    def is_certified(self) -> bool:
        return self.nonglobal and self.differentiable_ball


@dataclass(eq=False)
class LiftReport:
    """Certification of the point padded with zero coordinates.

    The padded Hessian is block diagonal: the original Hessian plus m
    copies of M. lambda_min_lower certifies the m = 1 padding; since the
    extra spectrum is the same for every m, so are all other constants.
    """

    point_ref: str
    M: np.ndarray
    spectrum_M: List[float]
    lambda_min_lower: float
    lift_certified: bool
    m_note: str
