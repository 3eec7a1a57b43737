"""Exact arithmetic on matrices of doubles.

Every finite double is m * 2**e with integer m, so a matrix of doubles is
an integer matrix times one power of two. Products and differences of
such matrices are then exact in Python integers.
"""

from dataclasses import dataclass

import numpy as np

MANTISSA_BITS = 53


@dataclass(frozen=True, eq=False)
class DyadicMatrix:
    """The exact matrix ints * 2**exp (ints is an object array of Python ints)."""

    ints: np.ndarray
    exp: int

    @classmethod
    def from_float(cls, A: np.ndarray) -> "DyadicMatrix":
        A = np.asarray(A, dtype=np.float64)
        if not np.all(np.isfinite(A)):
            raise ValueError("matrix has non-finite entries")
        mant, expo = np.frexp(A)
        m = (mant * 2.0**MANTISSA_BITS).astype(np.int64)
        e = expo.astype(np.int64) - MANTISSA_BITS
        nonzero = m != 0
        base = int(e[nonzero].min()) if nonzero.any() else 0
        ints = np.empty(A.shape, dtype=object)
        flat = ints.reshape(-1)
        for idx, (mi, ei) in enumerate(zip(m.reshape(-1), e.reshape(-1))):
            flat[idx] = int(mi) << int(ei - base) if mi else 0
        return cls(ints, base)

    @classmethod
    def identity(cls, size: int) -> "DyadicMatrix":
        ints = np.zeros((size, size), dtype=object)
        for i in range(size):
            ints[i, i] = 1
        return cls(ints, 0)

    def _aligned(self, other: "DyadicMatrix"):
        exp = min(self.exp, other.exp)
        a = self.ints * (1 << (self.exp - exp)) if self.exp != exp else self.ints
        b = other.ints * (1 << (other.exp - exp)) if other.exp != exp else other.ints
        return a, b, exp

    def __sub__(self, other: "DyadicMatrix") -> "DyadicMatrix":
        a, b, exp = self._aligned(other)
        return DyadicMatrix(a - b, exp)

    def __matmul__(self, other: "DyadicMatrix") -> "DyadicMatrix":
        return DyadicMatrix(self.ints.dot(other.ints), self.exp + other.exp)

    def scale_columns(self, d: "DyadicMatrix") -> "DyadicMatrix":
        """self @ diag(d) for a 1-D dyadic vector d."""
        return DyadicMatrix(self.ints * d.ints[None, :], self.exp + d.exp)

    @property
    def T(self) -> "DyadicMatrix":
        return DyadicMatrix(self.ints.T, self.exp)

    def frobenius_sq(self) -> tuple:
        """Exact squared Frobenius norm as (integer, exponent)."""
        total = sum(int(x) * int(x) for x in self.ints.reshape(-1))
        return total, 2 * self.exp

    def diagonally_dominant(self) -> bool:
        """Strict row diagonal dominance, decided exactly."""
        n = self.ints.shape[0]
        for i in range(n):
            row = [abs(int(x)) for x in self.ints[i]]
            if row[i] <= sum(row) - row[i]:
                return False
        return True
