"""Gradient descent search, canonical forms and candidate deduplication."""

from relucert.search.canonical import EXACT_MAX_K, align_to, canonicalize
from relucert.search.cluster import DEFAULT_DEDUP_THRESHOLD, dedup_cluster
from relucert.search.descent import gd_run, run_seed, xavier_init

__all__ = [
    "DEFAULT_DEDUP_THRESHOLD",
    "EXACT_MAX_K",
    "align_to",
    "canonicalize",
    "dedup_cluster",
    "gd_run",
    "run_seed",
    "xavier_init",
]
