"""Rigorous enclosures of F, its gradient and its Hessian.

The same closed forms as the float path, evaluated in outward-rounded
interval arithmetic. No clamping is done: cosines are intersected with
[-1, 1], which the true value always satisfies, and any pair whose
sin(theta) enclosure reaches zero is refused for derivatives.
"""

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from gmpy2 import mpfr

from relucert.closed_form.objective import _as_arrays
from relucert.rigor.enclosure import (
    DEFAULT_PRECISION,
    Enclosure,
    check_precision,
    edot,
    enclose_vector,
    enorm,
    esum,
    pi_enclosure,
)
from relucert.utils.errors import SingularEnclosureError, ZeroNeuronError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class _Vector:
    label: str
    coords: List[Enclosure]
    norm: Enclosure
    unit: List[Enclosure]


@dataclass(frozen=True, eq=False)
class _Pair:
    w: _Vector
    u: _Vector
    cos: Enclosure
    theta: Enclosure
    sin: Enclosure

    @property
    def labels(self) -> Tuple[str, str]:
        return (self.w.label, self.u.label)


def _vector(label: str, row: np.ndarray, precision: int) -> _Vector:
    coords = enclose_vector(row, precision)
    norm = enorm(coords, precision)
    if not norm.is_positive():
        raise ZeroNeuronError(f"{label} is the zero vector")
    return _Vector(label, coords, norm, [c / norm for c in coords])


def _pair(w: _Vector, u: _Vector, precision: int) -> _Pair:
    cos = (edot(w.coords, u.coords, precision) / (w.norm * u.norm)).intersect(-1, 1)
    theta = cos.acos()
    sin = (1 - cos.square()).intersect(0, 1).sqrt()
    return _Pair(w, u, cos, theta, sin)


def _require_smooth(pair: _Pair) -> None:
    if not pair.sin.is_positive():
        raise SingularEnclosureError(
            f"sin(theta) enclosure for ({pair.w.label}, {pair.u.label}) contains 0",
            pair=pair.labels,
        )


class _Problem:
    """Enclosed neurons, targets and pair data for one point."""

    def __init__(self, W, V, precision: int):
        self.precision = check_precision(precision)
        Wm, Vm = _as_arrays(W, V)
        self.n, self.d = Wm.shape
        self.neurons = [_vector(f"w{i}", Wm[i], precision) for i in range(self.n)]
        self.targets = [_vector(f"v{j}", Vm[j], precision) for j in range(Vm.shape[0])]
        self.pi = pi_enclosure(precision)
        self.two_pi = self.pi * 2
        self._pairs = {}

    def pair(self, a: _Vector, b: _Vector) -> _Pair:
        key = (a.label, b.label)
        if key not in self._pairs:
            self._pairs[key] = _pair(a, b, self.precision)
        return self._pairs[key]

    def kernel(self, a: _Vector, b: _Vector) -> Enclosure:
        p = self.pair(a, b)
        return a.norm * b.norm * (p.sin + (self.pi - p.theta) * p.cos) / self.two_pi

    def grad_term(self, a: _Vector, b: _Vector) -> List[Enclosure]:
        p = self.pair(a, b)
        _require_smooth(p)
        scale = b.norm * p.sin
        return [
            (scale * a.unit[c] + (self.pi - p.theta) * b.coords[c]) / self.two_pi
            for c in range(self.d)
        ]

    def h1(self, a: _Vector, b: _Vector) -> List[List[Enclosure]]:
        p = self.pair(a, b)
        _require_smooth(p)
        n_bar = [(b.unit[c] - p.cos * a.unit[c]) / p.sin for c in range(self.d)]
        scale = p.sin * b.norm / (self.two_pi * a.norm)
        block = []
        for r in range(self.d):
            row = []
            for c in range(self.d):
                inner = n_bar[r] * n_bar[c] - a.unit[r] * a.unit[c]
                if r == c:
                    inner = inner + 1
                row.append(scale * inner)
            block.append(row)
        return block

    def h2(self, a: _Vector, b: _Vector) -> List[List[Enclosure]]:
        p = self.pair(a, b)
        _require_smooth(p)
        n_ab = [(a.unit[c] - p.cos * b.unit[c]) / p.sin for c in range(self.d)]
        n_ba = [(b.unit[c] - p.cos * a.unit[c]) / p.sin for c in range(self.d)]
        angle = self.pi - p.theta
        block = []
        for r in range(self.d):
            row = []
            for c in range(self.d):
                entry = n_ab[r] * b.unit[c] + n_ba[r] * a.unit[c]
                if r == c:
                    entry = entry + angle
                row.append(entry / self.two_pi)
            block.append(row)
        return block


def enclose_objective(W, V, precision: int = DEFAULT_PRECISION) -> Enclosure:
    """Enclosure of F(W); defined at every point with nonzero neurons."""
    prob = _Problem(W, V, precision)
    half = Enclosure.exact(0.5, precision)
    terms = []
    for a in prob.neurons:
        for b in prob.neurons:
            if a is b:
                terms.append(half * a.norm.square() * half)
            else:
                terms.append(half * prob.kernel(a, b))
    for a in prob.neurons:
        for b in prob.targets:
            terms.append(-prob.kernel(a, b))
    for a in prob.targets:
        for b in prob.targets:
            if a is b:
                terms.append(half * a.norm.square() * half)
            else:
                terms.append(half * prob.kernel(a, b))
    return esum(terms, precision)


def enclose_gradient(W, V, precision: int = DEFAULT_PRECISION) -> List[Enclosure]:
    """Coordinate enclosures of grad F(W), flat row-major.

    Raises:
        SingularEnclosureError: If any pair's sin(theta) enclosure contains 0.
    """
    prob = _Problem(W, V, precision)
    half = Enclosure.exact(0.5, precision)
    out: List[Enclosure] = []
    for a in prob.neurons:
        block = [half * x for x in a.coords]
        for b in prob.neurons:
            if b is a:
                continue
            block = [x + y for x, y in zip(block, prob.grad_term(a, b))]
        for b in prob.targets:
            block = [x - y for x, y in zip(block, prob.grad_term(a, b))]
        out.extend(block)
    return out


def enclose_gradient_norm(W, V, precision: int = DEFAULT_PRECISION) -> Enclosure:
    """Enclosure of ||grad F(W)||_2; hi is a certified epsilon."""
    return enorm(enclose_gradient(W, V, precision), precision)


class EnclosureMatrix:
    """A symmetric matrix of Enclosures.

    entries[a, b] and entries[b, a] are the same object.
    """

    def __init__(self, entries: np.ndarray, precision: int):
        self.entries = entries
        self.precision = precision

    @property
    def shape(self) -> Tuple[int, int]:
        return self.entries.shape

    def midpoint(self) -> np.ndarray:
        """Nearest-double midpoints; exactly symmetric."""
        size = self.entries.shape[0]
        A = np.empty((size, size))
        for a in range(size):
            for b in range(a, size):
                A[a, b] = A[b, a] = self.entries[a, b].mid_float()
        return A

    def distance_bound(self, A: np.ndarray) -> mpfr:
        """Upper bound on ||true - A||_F.

        Sum of the Frobenius distance from the enclosure midpoints to A
        and the Frobenius norm of the enclosure radii.
        """
        p = self.precision
        offsets = []
        radii = []
        for a, b in np.ndindex(*self.entries.shape):
            e = self.entries[a, b]
            mid = Enclosure.exact(e.mid(), p)
            offsets.append((mid - float(A[a, b])).square())
            radii.append(Enclosure.exact(e.radius(), p).square())
        return (esum(offsets, p).sqrt() + esum(radii, p).sqrt()).hi

    def contains(self, A: np.ndarray) -> bool:
        return all(
            self.entries[a, b].contains(float(A[a, b]))
            for a, b in np.ndindex(*self.entries.shape)
        )

    def max_width(self) -> mpfr:
        return max(e.width() for e in self.entries.reshape(-1))


def enclose_hessian(W, V, precision: int = DEFAULT_PRECISION) -> EnclosureMatrix:
    """Entrywise enclosures of the Hessian of F at W.

    Raises:
        SingularEnclosureError: If any pair's sin(theta) enclosure contains 0.
    """
    prob = _Problem(W, V, precision)
    d = prob.d
    size = prob.n * d
    half = Enclosure.exact(0.5, precision)
    zero = Enclosure.exact(0, precision)
    H = np.empty((size, size), dtype=object)

    for i, a in enumerate(prob.neurons):
        block = [[half if r == c else zero for c in range(d)] for r in range(d)]
        for b in prob.neurons:
            if b is a:
                continue
            h1 = prob.h1(a, b)
            block = [[block[r][c] + h1[r][c] for c in range(d)] for r in range(d)]
        for b in prob.targets:
            h1 = prob.h1(a, b)
            block = [[block[r][c] - h1[r][c] for c in range(d)] for r in range(d)]
        base = i * d
        for r in range(d):
            for c in range(r, d):
                H[base + r, base + c] = H[base + c, base + r] = block[r][c]

        for j in range(i + 1, prob.n):
            h2 = prob.h2(a, prob.neurons[j])
            col = j * d
            for r in range(d):
                for c in range(d):
                    H[base + r, col + c] = H[col + c, base + r] = h2[r][c]

    logger.debug("enclosed %dx%d Hessian at %d bits", size, size, precision)
    return EnclosureMatrix(H, precision)


def float_matrix_enclosure(A: np.ndarray, precision: int = DEFAULT_PRECISION) -> EnclosureMatrix:
    """Point enclosures of an exactly known double matrix (upper triangle mirrored)."""
    A = np.asarray(A, dtype=np.float64)
    size = A.shape[0]
    entries = np.empty((size, size), dtype=object)
    for a in range(size):
        for b in range(a, size):
            entries[a, b] = entries[b, a] = Enclosure.exact(float(A[a, b]), precision)
    return EnclosureMatrix(entries, precision)


def norm_bounds(rows: np.ndarray, precision: int = DEFAULT_PRECISION) -> List[Enclosure]:
    """Enclosures of the Euclidean norm of each row."""
    return [enorm(enclose_vector(row, precision), precision) for row in np.atleast_2d(rows)]

