"""Outward-rounded interval arithmetic on MPFR numbers.

An Enclosure [lo, hi] always contains the true value of the quantity it
stands for. Lower endpoints are computed with RoundDown, upper endpoints
with RoundUp, at the enclosure's precision.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence, Union

import gmpy2
from gmpy2 import mpfr

DEFAULT_PRECISION = 256
MAX_PRECISION = 4096
# Doubles must convert exactly.
MIN_PRECISION = 64

Number = Union[int, float, "mpfr"]


def _down(precision: int):
    return gmpy2.context(precision=precision, round=gmpy2.RoundDown)


def _up(precision: int):
    return gmpy2.context(precision=precision, round=gmpy2.RoundUp)


def check_precision(precision: int) -> int:
    if precision < MIN_PRECISION:
        raise ValueError(f"precision must be at least {MIN_PRECISION} bits, got {precision}")
    return int(precision)


@dataclass(frozen=True, eq=False)
class Enclosure:
    """A rigorous real interval [lo, hi] at a fixed precision."""

    lo: mpfr
    hi: mpfr
    precision: int = DEFAULT_PRECISION

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"empty enclosure [{self.lo}, {self.hi}]")

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------

    @classmethod
    def exact(cls, value: Number, precision: int = DEFAULT_PRECISION) -> "Enclosure":
        """Enclose a float, int or mpfr value (exact when representable)."""
        if isinstance(value, Enclosure):
            return value
        if isinstance(value, float) and not math.isfinite(value):
            raise ValueError(f"cannot enclose non-finite value {value}")
        with _down(precision):
            lo = mpfr(value)
        with _up(precision):
            hi = mpfr(value)
        return cls(lo, hi, precision)

    @classmethod
    def hull(cls, lo: Number, hi: Number, precision: int = DEFAULT_PRECISION) -> "Enclosure":
        """Enclosure containing both lo and hi."""
        with _down(precision):
            a = mpfr(lo)
        with _up(precision):
            b = mpfr(hi)
        return cls(a, b, precision)

    def _coerce(self, other) -> "Enclosure":
        if isinstance(other, Enclosure):
            return other
        return Enclosure.exact(other, self.precision)

    def _prec(self, other: "Enclosure") -> int:
        return max(self.precision, other.precision)

    # ------------------------------------------------------------------
    # arithmetic
    # ------------------------------------------------------------------

    def __add__(self, other) -> "Enclosure":
        other = self._coerce(other)
        p = self._prec(other)
        with _down(p):
            lo = self.lo + other.lo
        with _up(p):
            hi = self.hi + other.hi
        return Enclosure(lo, hi, p)

    __radd__ = __add__

    def __neg__(self) -> "Enclosure":
        p = self.precision
        # Exact at p, but must not fall back to the 53-bit default context.
        with _down(p):
            lo = -self.hi
        with _up(p):
            hi = -self.lo
        return Enclosure(lo, hi, p)

    def __sub__(self, other) -> "Enclosure":
        other = self._coerce(other)
        p = self._prec(other)
        with _down(p):
            lo = self.lo - other.hi
        with _up(p):
            hi = self.hi - other.lo
        return Enclosure(lo, hi, p)

    def __rsub__(self, other) -> "Enclosure":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Enclosure":
        other = self._coerce(other)
        p = self._prec(other)
        pairs = (
            (self.lo, other.lo),
            (self.lo, other.hi),
            (self.hi, other.lo),
            (self.hi, other.hi),
        )
        with _down(p):
            lo = min(a * b for a, b in pairs)
        with _up(p):
            hi = max(a * b for a, b in pairs)
        return Enclosure(lo, hi, p)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Enclosure":
        other = self._coerce(other)
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("divisor enclosure contains zero")
        p = self._prec(other)
        pairs = (
            (self.lo, other.lo),
            (self.lo, other.hi),
            (self.hi, other.lo),
            (self.hi, other.hi),
        )
        with _down(p):
            lo = min(a / b for a, b in pairs)
        with _up(p):
            hi = max(a / b for a, b in pairs)
        return Enclosure(lo, hi, p)

    def __rtruediv__(self, other) -> "Enclosure":
        return self._coerce(other) / self

    def square(self) -> "Enclosure":
        """Tighter than self * self when the enclosure straddles zero."""
        p = self.precision
        mag = abs(self)
        with _down(p):
            lo = mag.lo * mag.lo
        with _up(p):
            hi = mag.hi * mag.hi
        return Enclosure(lo, hi, p)

    def __abs__(self) -> "Enclosure":
        p = self.precision
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        with _up(p):
            b = max(-self.lo, self.hi)
        return Enclosure(mpfr(0), b, p)

    def sqrt(self) -> "Enclosure":
        """Square root of a quantity known to be nonnegative.

        A slightly negative lower endpoint is an artifact of rounding and
        is raised to zero.
        """
        if self.hi < 0:
            raise ValueError("sqrt of a negative enclosure")
        p = self.precision
        with _down(p):
            lo = gmpy2.sqrt(max(self.lo, mpfr(0)))
        with _up(p):
            hi = gmpy2.sqrt(self.hi)
        return Enclosure(lo, hi, p)

    def acos(self) -> "Enclosure":
        """arccos of a cosine; the argument is intersected with [-1, 1]."""
        p = self.precision
        a = max(self.lo, mpfr(-1))
        b = min(self.hi, mpfr(1))
        if a > b:
            raise ValueError("acos argument enclosure lies outside [-1, 1]")
        with _down(p):
            lo = gmpy2.acos(b)
        with _up(p):
            hi = gmpy2.acos(a)
        return Enclosure(lo, hi, p)

    def asin(self) -> "Enclosure":
        """arcsin; the argument is intersected with [-1, 1]."""
        p = self.precision
        a = max(self.lo, mpfr(-1))
        b = min(self.hi, mpfr(1))
        if a > b:
            raise ValueError("asin argument enclosure lies outside [-1, 1]")
        with _down(p):
            lo = gmpy2.asin(a)
        with _up(p):
            hi = gmpy2.asin(b)
        return Enclosure(lo, hi, p)

    def intersect(self, lo: Number, hi: Number) -> "Enclosure":
        """Intersect with a range the true value is known to lie in."""
        a = max(self.lo, mpfr(lo))
        b = min(self.hi, mpfr(hi))
        if a > b:
            raise ValueError("intersection is empty")
        return Enclosure(a, b, self.precision)

    def max(self, other) -> "Enclosure":
        other = self._coerce(other)
        return Enclosure(max(self.lo, other.lo), max(self.hi, other.hi), self._prec(other))

    def min(self, other) -> "Enclosure":
        other = self._coerce(other)
        return Enclosure(min(self.lo, other.lo), min(self.hi, other.hi), self._prec(other))

    # ------------------------------------------------------------------
    # queries
    # ------------------------------------------------------------------

    def contains(self, value: Number) -> bool:
        return bool(self.lo <= value <= self.hi)

    def width(self) -> mpfr:
        with _up(self.precision):
            return self.hi - self.lo

    def radius(self) -> mpfr:
        with _up(self.precision):
            return (self.hi - self.lo) / 2

    def mid(self) -> mpfr:
        with gmpy2.context(precision=self.precision):
            return (self.lo + self.hi) / 2

    def lower_float(self) -> float:
        """Largest double that is <= lo."""
        f = float(self.lo)
        if mpfr(f) > self.lo:
            f = math.nextafter(f, -math.inf)
        return f

    def upper_float(self) -> float:
        """Smallest double that is >= hi."""
        f = float(self.hi)
        if mpfr(f) < self.hi:
            f = math.nextafter(f, math.inf)
        return f

    def mid_float(self) -> float:
        return float(self.mid())

    def is_positive(self) -> bool:
        return bool(self.lo > 0)

    def is_nonpositive(self) -> bool:
        return bool(self.hi <= 0)

    def __repr__(self) -> str:
        return f"Enclosure([{float(self.lo)!r}, {float(self.hi)!r}], precision={self.precision})"


@lru_cache(maxsize=None)
def pi_enclosure(precision: int = DEFAULT_PRECISION) -> Enclosure:
    with _down(precision):
        lo = gmpy2.const_pi()
    with _up(precision):
        hi = gmpy2.const_pi()
    return Enclosure(lo, hi, precision)


def esum(terms: Iterable[Enclosure], precision: int = DEFAULT_PRECISION) -> Enclosure:
    total = Enclosure.exact(0, precision)
    for term in terms:
        total = total + term
    return total


def edot(a: Sequence[Enclosure], b: Sequence[Enclosure], precision: int = DEFAULT_PRECISION) -> Enclosure:
    return esum((x * y for x, y in zip(a, b)), precision)


def enorm(vec: Sequence[Enclosure], precision: int = DEFAULT_PRECISION) -> Enclosure:
    """Euclidean norm of a vector of enclosures."""
    return esum((x.square() for x in vec), precision).sqrt()


def enclose_vector(values: Iterable[Number], precision: int = DEFAULT_PRECISION) -> list:
    return [Enclosure.exact(float(x), precision) for x in values]


def upper_sqrt(value: int, scale_exp: int, precision: int = DEFAULT_PRECISION) -> mpfr:
    """Upper bound on sqrt(value * 2**scale_exp) for a nonnegative integer value."""
    with _up(precision):
        x = mpfr(value)
        x = gmpy2.mul_2exp(x, scale_exp)
        return gmpy2.sqrt(x)
