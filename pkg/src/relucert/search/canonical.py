"""Canonical forms under neuron and coordinate permutations.

With standard-basis targets, F is invariant under reordering the neurons
(rows of W) and under permuting the coordinates (columns of W), since a
coordinate permutation only reorders the targets. Candidates found by
different runs are compared through these canonical forms.
"""

import itertools
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from relucert.models.points import TargetBasis, WeightPoint
from relucert.utils.errors import SymmetryUnavailableError

# Exhaustive search over column permutations up to this width; rows are
# then placed optimally by a lexicographic sort.
EXACT_MAX_K = 7


def _sort_rows(M: np.ndarray) -> np.ndarray:
    # lexsort treats the last key as primary
    return M[np.lexsort(M.T[::-1])]


def _lex_less(a: np.ndarray, b: np.ndarray) -> bool:
    differ = np.flatnonzero(a != b)
    if differ.size == 0:
        return False
    i = differ[0]
    return bool(a.flat[i] < b.flat[i])


def _exhaustive(W: np.ndarray) -> np.ndarray:
    best = None
    for perm in itertools.permutations(range(W.shape[1])):
        candidate = _sort_rows(W[:, perm])
        if best is None or _lex_less(candidate, best):
            best = candidate
    return best


def _surrogate(W: np.ndarray) -> np.ndarray:
    order = np.argsort(-W.max(axis=0), kind="stable")
    return _sort_rows(W[:, order])


def require_symmetry(V: Optional[TargetBasis]) -> None:
    if V is not None and not V.is_standard():
        raise SymmetryUnavailableError(
            "permutation symmetry needs the standard basis as targets"
        )


def canonicalize(W: WeightPoint, V: Optional[TargetBasis] = None) -> WeightPoint:
    """Representative of W's orbit under row and column permutations.

    For widths up to EXACT_MAX_K this is the lexicographically smallest
    matrix in the orbit. Wider points use a sort-based key (columns by
    descending maximum, then rows lexicographically), which is idempotent
    but not guaranteed to identify every equivalent pair.

    Raises:
        SymmetryUnavailableError: If V is given and is not the standard basis.
    """
    require_symmetry(V)
    if W.d <= EXACT_MAX_K:
        return WeightPoint(_exhaustive(W.W))
    return WeightPoint(_surrogate(W.W))


def _match_rows(R: np.ndarray, A: np.ndarray) -> np.ndarray:
    _, rows = linear_sum_assignment(cdist(R, A, "sqeuclidean"))
    return A[rows]


def _alternate(R: np.ndarray, A: np.ndarray, max_rounds: int = 50) -> np.ndarray:
    # Each half-step cannot increase the distance, so this stops at a fixed point.
    dist = np.inf
    for _ in range(max_rounds):
        A = _match_rows(R, A)
        _, cols = linear_sum_assignment(cdist(R.T, A.T, "sqeuclidean"))
        A = A[:, cols]
        new = float(np.linalg.norm(A - R))
        if new >= dist:
            break
        dist = new
    return A


def align_to(reference: WeightPoint, W: WeightPoint) -> Tuple[WeightPoint, float]:
    """Permute W's rows and columns to sit close to reference.

    Up to EXACT_MAX_K columns every column permutation is tried, with the
    rows placed by Hungarian matching, so the distance is the distance
    between the two orbits. Wider points alternate row and column
    matching from several starts, which gives an upper bound. The result
    is always a genuine permutation of W.
    """
    if reference.W.shape != W.W.shape:
        raise ValueError("cannot align points of different shapes")
    R = reference.W
    A = W.W
    if W.d <= EXACT_MAX_K:
        starts = (A[:, list(perm)] for perm in itertools.permutations(range(W.d)))
        candidates = (_match_rows(R, S) for S in starts)
    else:
        # identity, and columns ordered to match the reference's column maxima
        ref_order = np.argsort(np.argsort(-R.max(axis=0), kind="stable"), kind="stable")
        by_max = A[:, np.argsort(-A.max(axis=0), kind="stable")][:, ref_order]
        candidates = (_alternate(R, S) for S in (A, by_max))

    best, best_dist = A, float(np.linalg.norm(A - R))
    for C in candidates:
        dist = float(np.linalg.norm(C - R))
        if dist < best_dist:
            best, best_dist = C, dist
    return WeightPoint(best), best_dist
