"""Group candidate terminal points that are equivalent up to permutation."""

import logging
from typing import List, Optional, Sequence

from relucert.models.points import TargetBasis
from relucert.models.records import CandidateClass, RunRecord
from relucert.search.canonical import align_to, canonicalize, require_symmetry

logger = logging.getLogger(__name__)

DEFAULT_DEDUP_THRESHOLD = 1e-4


def dedup_cluster(
    records: Sequence[RunRecord],
    threshold: float = DEFAULT_DEDUP_THRESHOLD,
    V: Optional[TargetBasis] = None,
) -> List[CandidateClass]:
    """Greedy complete-linkage clustering of canonicalized terminals.

    Records are visited in order. A record joins the first class whose
    every member lies within threshold of it (after alignment onto the
    class canonical form); otherwise it opens a new class. The first
    member of each class is its representative.

    Raises:
        ValueError: If the records mix different (k, n).
        SymmetryUnavailableError: If V is not the standard basis.
    """
    require_symmetry(V)
    if not records:
        return []
    shapes = {(r.config.k, r.config.n) for r in records}
    if len(shapes) > 1:
        raise ValueError(f"records mix configurations {sorted(shapes)}")

    classes: List[CandidateClass] = []
    for record in records:
        canon = canonicalize(record.terminal)
        placed = False
        for cls in classes:
            aligned, dist = align_to(cls.canonical, canon)
            if dist > threshold:
                continue
            spread = [aligned.distance(other) for other in cls.aligned]
            if spread and max(spread) > threshold:
                continue
            cls.members.append(record)
            cls.aligned.append(aligned)
            cls.distances.append(dist)
            cls.diameter = max([cls.diameter] + spread)
            placed = True
            break
        if not placed:
            classes.append(
                CandidateClass(
                    canonical=canon,
                    members=[record],
                    aligned=[canon],
                    distances=[0.0],
                    diameter=0.0,
                )
            )

    logger.info(
        "%d candidates fell into %d classes (largest diameter %.3g)",
        len(records),
        len(classes),
        max(c.diameter for c in classes),
    )
    return classes

