"""Checks that a certified ball stays where F is thrice differentiable.

F loses smoothness where a neuron is zero or where two vectors of a
pair become parallel. Inside a ball of radius r each neuron w moves by
at most r, so its direction turns by at most asin(r / ||w||).
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from relucert.certify.models import Certificate
from relucert.models.points import TargetBasis, WeightPoint
from relucert.rigor.enclosure import (
    DEFAULT_PRECISION,
    Enclosure,
    edot,
    enclose_vector,
    enorm,
    pi_enclosure,
)


@dataclass
class DisjointnessReport:
    """Failures found by ball_disjointness_check (empty lists mean pass)."""

    origin_failures: List[int] = field(default_factory=list)
    pair_failures: List[Tuple[int, str, str]] = field(default_factory=list)
    intersecting: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not (self.origin_failures or self.pair_failures or self.intersecting)


def _turn_bound(norm: Enclosure, r: float) -> Enclosure:
    return (Enclosure.exact(r, norm.precision) / norm).asin()


def singular_pairs_in_ball(
    W: WeightPoint,
    V: TargetBasis,
    r: float,
    precision: int = DEFAULT_PRECISION,
) -> Tuple[bool, List[Tuple[str, str]]]:
    """Whether the radius-r ball avoids zero neurons, and any pair that may turn parallel.

    Returns:
        (origin_ok, pairs) where pairs lists labels that could become
        parallel or antiparallel inside the ball.
    """
    pi = pi_enclosure(precision)
    coords = [enclose_vector(row, precision) for row in W.W]
    norms = [enorm(c, precision) for c in coords]
    if not all(n.lo > r for n in norms):
        return False, []
    turns = [_turn_bound(n, r) for n in norms]

    t_coords = [enclose_vector(row, precision) for row in V.vectors]
    t_norms = [enorm(c, precision) for c in t_coords]

    def clear(ca, na, cb, nb, slack) -> bool:
        cos = (edot(ca, cb, precision) / (na * nb)).intersect(-1, 1)
        theta = cos.acos()
        return (theta - slack).is_positive() and (pi - theta - slack).is_positive()

    bad: List[Tuple[str, str]] = []
    for i in range(W.n):
        for j in range(i + 1, W.n):
            if not clear(coords[i], norms[i], coords[j], norms[j], turns[i] + turns[j]):
                bad.append((f"w{i}", f"w{j}"))
        for j in range(V.k):
            if not clear(coords[i], norms[i], t_coords[j], t_norms[j], turns[i]):
                bad.append((f"w{i}", f"v{j}"))
    return True, bad


def ball_disjointness_check(
    certs: Sequence[Certificate],
    V: Optional[TargetBasis] = None,
    precision: int = DEFAULT_PRECISION,
) -> DisjointnessReport:
    """Origin, neuron-pair and cross-certificate checks for a batch.

    Two certificates whose balls may intersect (centre distance not above
    r_a + r_b) are reported as intersecting.
    """
    report = DisjointnessReport()
    for idx, cert in enumerate(certs):
        targets = V if V is not None else cert.targets
        origin_ok, bad = singular_pairs_in_ball(cert.point, targets, cert.r, precision)
        if not origin_ok:
            report.origin_failures.append(idx)
        report.pair_failures.extend((idx, a, b) for a, b in bad)

    for a in range(len(certs)):
        for b in range(a + 1, len(certs)):
            if certs[a].point.W.shape != certs[b].point.W.shape:
                continue
            diff = [
                x - y
                for x, y in zip(
                    enclose_vector(certs[a].point.W.ravel(), precision),
                    enclose_vector(certs[b].point.W.ravel(), precision),
                )
            ]
            dist = enorm(diff, precision)
            if not (dist - certs[a].r - certs[b].r).is_positive():
                report.intersecting.append((a, b))
    return report
