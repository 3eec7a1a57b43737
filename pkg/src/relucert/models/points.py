"""Points in parameter space and the fixed target network.

- WeightPoint: the trained network, one row per neuron
- TargetBasis: the target neurons v_1..v_k
- PairGeometry: angle data for a pair of vectors
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


@dataclass(frozen=True, eq=False)
class WeightPoint:
    """An n x d matrix of neuron weights (row i is neuron w_i).

    In the base problem d == k; after zero-padding d == k + m.
    """

    W: np.ndarray

    def __post_init__(self) -> None:
        W = np.array(self.W, dtype=np.float64)
        if W.ndim != 2 or W.shape[0] < 1 or W.shape[1] < 1:
            raise ValueError(f"WeightPoint needs a nonempty 2-D array, got shape {W.shape}")
        if not np.all(np.isfinite(W)):
            raise ValueError("WeightPoint entries must be finite")
        W.setflags(write=False)
        object.__setattr__(self, "W", W)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "WeightPoint":
        return cls(np.asarray(rows, dtype=np.float64))

    @classmethod
    def from_flat(cls, flat: np.ndarray, n: int, d: int) -> "WeightPoint":
        return cls(np.asarray(flat, dtype=np.float64).reshape(n, d))

    @property
    def n(self) -> int:
        return self.W.shape[0]

    @property
    def d(self) -> int:
        return self.W.shape[1]

    @property
    def k(self) -> int:
        """Input dimension (equals the target count in the base problem)."""
        return self.W.shape[1]

    def flat(self) -> np.ndarray:
        """Row-major parameter vector of length n*d."""
        return self.W.reshape(-1).copy()

    def neuron_norms(self) -> np.ndarray:
        return np.linalg.norm(self.W, axis=1)

    def distance(self, other: "WeightPoint") -> float:
        return float(np.linalg.norm(self.W - other.W))


@dataclass(frozen=True, eq=False)
class TargetBasis:
    """The k target neurons, stored as a k x d matrix.

    The default construction is the standard basis of R^k.
    """

    vectors: np.ndarray
    orthonormal_flag: bool = field(default=False, init=False)

    def __post_init__(self) -> None:
        V = np.array(self.vectors, dtype=np.float64)
        if V.ndim != 2 or V.shape[0] < 1:
            raise ValueError(f"TargetBasis needs a nonempty 2-D array, got shape {V.shape}")
        if np.any(np.linalg.norm(V, axis=1) == 0.0):
            raise ValueError("TargetBasis rows must be nonzero")
        V.setflags(write=False)
        object.__setattr__(self, "vectors", V)
        gram = V @ V.T
        object.__setattr__(
            self, "orthonormal_flag", bool(np.array_equal(gram, np.eye(V.shape[0])))
        )

    @classmethod
    def standard(cls, k: int) -> "TargetBasis":
        if k < 1:
            raise ValueError("k must be >= 1")
        return cls(np.eye(k))

    @property
    def k(self) -> int:
        return self.vectors.shape[0]

    @property
    def d(self) -> int:
        return self.vectors.shape[1]

    def is_standard(self) -> bool:
        """True when the rows are exactly e_1..e_k of R^k."""
        return self.k == self.d and bool(np.array_equal(self.vectors, np.eye(self.k)))

    def max_norm(self) -> float:
        return float(np.max(np.linalg.norm(self.vectors, axis=1)))


@dataclass(frozen=True, eq=False)
class PairGeometry:
    """Angle data for a pair (w, v).

    n_vw = v_bar - cos(theta) w_bar has norm sin(theta). The unit residual
    n_bar_vw is None when the pair is parallel (sin(theta) == 0).
    """

    theta: float
    sin_theta: float
    cos_theta: float
    w_norm: float
    v_norm: float
    w_bar: np.ndarray
    v_bar: np.ndarray
    n_vw: np.ndarray
    n_bar_vw: Optional[np.ndarray]

    @property
    def parallel(self) -> bool:
        return self.sin_theta == 0.0
