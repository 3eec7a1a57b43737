"""Data models for relucert."""

from relucert.models.points import PairGeometry, TargetBasis, WeightPoint
from relucert.models.records import (
    CANDIDATE_THRESHOLD,
    DEFAULT_GRAD_TOL,
    DEFAULT_MAX_ITERS,
    DEFAULT_STEP_SIZE,
    GLOBAL_LIKE_THRESHOLD,
    CandidateClass,
    Classification,
    GDConfig,
    RunRecord,
    classify,
)

__all__ = [
    "CANDIDATE_THRESHOLD",
    "DEFAULT_GRAD_TOL",
    "DEFAULT_MAX_ITERS",
    "DEFAULT_STEP_SIZE",
    "GLOBAL_LIKE_THRESHOLD",
    "CandidateClass",
    "Classification",
    "GDConfig",
    "PairGeometry",
    "RunRecord",
    "TargetBasis",
    "WeightPoint",
    "classify",
]
