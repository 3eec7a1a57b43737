"""Tests for enclosure arithmetic, exact dyadic products and certified bounds.

mpmath serves as an independent high-precision eigensolver.
"""

import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from gmpy2 import mpfr, mpq

from relucert.closed_form import gradient_F, hessian_F, objective_F, spectral_norm
from relucert.models import TargetBasis, WeightPoint
from relucert.rigor import (
    NOT_CERTIFIED,
    BallSpec,
    Enclosure,
    EnclosureMatrix,
    central_binomial_identity_check,
    eigen_lower_bound,
    enclose_gradient,
    enclose_gradient_norm,
    enclose_hessian,
    enclose_objective,
    float_matrix_enclosure,
    hessian_norm_bound_LH,
    pi_enclosure,
    precision_schedule,
    third_order_bound_LA,
    with_precision_retry,
)
from relucert.rigor.dyadic import DyadicMatrix
from relucert.search import xavier_init
from relucert.utils import (
    DegenerateBallError,
    IndeterminateEnclosureError,
    SingularEnclosureError,
    ZeroNeuronError,
)


def _exact_min_eig(A: np.ndarray) -> mpmath.mpf:
    mpmath.mp.dps = 60
    eigenvalues, _ = mpmath.eigsy(mpmath.matrix(A.tolist()))
    return min(eigenvalues[i] for i in range(A.shape[0]))


def _random_spd(size: int, seed: int, shift: float) -> np.ndarray:
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((size, size))
    A = M @ M.T / size + shift * np.eye(size)
    return 0.5 * (A + A.T)


# =============================================================================
# ENCLOSURE ARITHMETIC TESTS
# =============================================================================


class TestEnclosure:
    """Tests for outward-rounded interval arithmetic."""

    def test_exact_double_is_a_point(self):
        """Doubles are enclosed exactly."""
        e = Enclosure.exact(0.1)
        assert e.lo == e.hi == mpfr(0.1)
        assert e.lower_float() == e.upper_float() == 0.1

    def test_division_encloses_true_quotient(self):
        """1/3 times 3 still contains 1."""
        third = Enclosure.exact(1) / 3
        assert third.lo < third.hi
        assert (third * 3).contains(1)

    def test_sqrt_and_square(self):
        """sqrt(2)^2 contains 2 and the enclosure is tight."""
        root = Enclosure.exact(2).sqrt()
        assert root.square().contains(2)
        assert root.width() < mpfr(2) ** -250

    def test_square_of_straddling_interval(self):
        """Squaring an interval around zero starts at zero."""
        sq = Enclosure.hull(-1, 2).square()
        assert sq.lo == 0 and sq.hi == 4

    def test_negation_keeps_precision(self):
        """-(1/6) still contains -1/6 exactly."""
        neg = -(Enclosure.exact(1) / 6)
        assert neg.contains(mpq(-1, 6))
        assert neg.width() < mpfr(2) ** -250

    def test_square_of_negative_interval(self):
        """(-(1/3))^2 contains 1/9."""
        assert (-(Enclosure.exact(1) / 3)).square().contains(mpq(1, 9))
        assert abs(-(Enclosure.exact(1) / 3)).contains(mpq(1, 3))

    def test_random_rationals_are_contained(self):
        """Every operation encloses the exact rational result at 64 bits."""
        rng = np.random.default_rng(7)
        for _ in range(1000):
            a, c = (int(x) for x in rng.integers(-(10**6), 10**6, size=2))
            b, d = (int(x) for x in rng.integers(1, 10**6, size=2))
            x = Enclosure.exact(a, 64) / b
            y = Enclosure.exact(c, 64) / d
            qx, qy = mpq(a, b), mpq(c, d)

            assert x.contains(qx)
            assert (-x).contains(-qx)
            assert (x + y).contains(qx + qy)
            assert (x - y).contains(qx - qy)
            assert (x * y).contains(qx * qy)
            assert x.square().contains(qx * qx)
            assert abs(x).contains(abs(qx))
            if c != 0:
                assert (x / y).contains(qx / qy)
            root = abs(x).sqrt()
            assert mpq(root.lo) ** 2 <= abs(qx) <= mpq(root.hi) ** 2

    def test_pi_enclosure(self):
        """math.pi is the largest double below pi."""
        pi = pi_enclosure(256)
        assert pi.lower_float() == math.pi
        assert pi.upper_float() == math.nextafter(math.pi, math.inf)

    def test_acos_of_zero(self):
        """2 acos(0) - pi contains zero."""
        assert (Enclosure.exact(0).acos() * 2 - pi_enclosure()).contains(0)

    def test_empty_enclosure_rejected(self):
        """lo must not exceed hi."""
        with pytest.raises(ValueError):
            Enclosure.hull(1, 0)

    def test_division_by_straddling_interval(self):
        """Dividing by an enclosure of zero is refused."""
        with pytest.raises(ZeroDivisionError):
            Enclosure.exact(1) / Enclosure.hull(-1, 1)

    def test_sign_queries(self):
        """An interval around zero is neither positive nor nonpositive."""
        e = Enclosure.hull(-1, 1)
        assert not e.is_positive()
        assert not e.is_nonpositive()
        assert Enclosure.exact(1e-300).is_positive()

    def test_precision_floor(self):
        """Fewer than 64 bits are refused."""
        with pytest.raises(ValueError):
            enclose_objective(np.eye(2), np.eye(2), precision=32)


class TestDyadicMatrix:
    """Tests for exact products of double matrices."""

    def test_frobenius_square_is_exact(self):
        """The integer representation reproduces 0.1^2 exactly."""
        total, exp = DyadicMatrix.from_float(np.array([[0.1]])).frobenius_sq()
        assert Fraction(total) * Fraction(2) ** exp == Fraction(0.1) ** 2

    def test_product_is_exact(self):
        """Products carry no rounding error."""
        A = np.array([[0.1, 0.2], [0.3, 0.7]])
        Ad = DyadicMatrix.from_float(A)
        product = Ad @ Ad
        expected = [[Fraction(0), Fraction(0)], [Fraction(0), Fraction(0)]]
        for i in range(2):
            for j in range(2):
                expected[i][j] = sum(Fraction(A[i, l]) * Fraction(A[l, j]) for l in range(2))
                assert Fraction(product.ints[i, j]) * Fraction(2) ** product.exp == expected[i][j]

    def test_difference_with_itself_is_zero(self):
        """A - A has zero Frobenius norm."""
        Ad = DyadicMatrix.from_float(np.random.default_rng(0).standard_normal((3, 3)))
        assert (Ad - Ad).frobenius_sq()[0] == 0

    def test_diagonal_dominance(self):
        """The identity is dominant; a matrix with large off-diagonals is not."""
        assert DyadicMatrix.identity(3).diagonally_dominant()
        assert not DyadicMatrix.from_float(np.array([[1.0, 2.0], [2.0, 1.0]])).diagonally_dominant()


# =============================================================================
# EIGENVALUE BOUND TESTS
# =============================================================================


class TestEigenLowerBound:
    """Tests for eigen_lower_bound."""

    def test_diagonal_matrix(self):
        """For a diagonal matrix the bound is the smallest entry."""
        report = eigen_lower_bound(np.diag([1.0, 2.0, 3.0]))
        assert report.certified
        assert 0 < report.lambda_min_lower <= 1.0
        assert report.lambda_min_lower == pytest.approx(1.0, abs=1e-12)

    def test_bound_is_sound_and_tight(self):
        """The bound lies below the high-precision eigenvalue and close to it."""
        A = _random_spd(8, seed=1, shift=0.05)
        report = eigen_lower_bound(A)
        exact = _exact_min_eig(A)
        assert report.certified
        assert mpmath.mpf(report.lambda_min_lower) <= exact
        assert float(exact) - report.lambda_min_lower < 1e-10

    def test_indefinite_matrix_not_certified(self):
        """A negative eigenvalue yields -1, a refusal."""
        report = eigen_lower_bound(np.diag([-1.0, 2.0]))
        assert report.lambda_min_lower == NOT_CERTIFIED
        assert not report.certified
        assert not report.indeterminate

    def test_negative_identity(self):
        """-I is refused with -1."""
        assert eigen_lower_bound(-np.eye(3)).lambda_min_lower == NOT_CERTIFIED

    def test_width_dominated_bound_is_indeterminate(self):
        """Wide entries around a positive matrix leave the question open."""
        entries = np.empty((2, 2), dtype=object)
        entries[0, 0] = entries[1, 1] = Enclosure.hull(-0.5, 2.5)
        entries[0, 1] = entries[1, 0] = Enclosure.exact(0)
        report = eigen_lower_bound(EnclosureMatrix(entries, 256))
        assert not report.certified
        assert report.indeterminate

    def test_non_symmetric_rejected(self):
        """A float matrix must be exactly symmetric."""
        with pytest.raises(ValueError):
            eigen_lower_bound(np.array([[1.0, 0.1], [0.0, 1.0]]))

    def test_enclosure_matrix_input(self):
        """Point enclosures give the same bound as the float matrix."""
        A = _random_spd(5, seed=2, shift=0.1)
        a = eigen_lower_bound(A)
        b = eigen_lower_bound(float_matrix_enclosure(A))
        assert a.lambda_min_lower == b.lambda_min_lower
        assert b.eps1.hi == 0

    def test_error_terms_reported(self):
        """The orthogonality constants are reported and small."""
        report = eigen_lower_bound(_random_spd(6, seed=3, shift=0.2))
        assert report.C_orth.hi < 1e-12
        assert report.B_orth.lo >= 1
        assert report.dimension == 6

    def test_central_binomial_identity(self):
        """sum C(2k,k) C(2n-2k,n-k) = 4^n."""
        assert all(central_binomial_identity_check(n) for n in range(31))
        assert central_binomial_identity_check(40)
        with pytest.raises(ValueError):
            central_binomial_identity_check(-1)

    @pytest.mark.slow
    def test_soundness_sweep(self):
        """The bound never exceeds the true eigenvalue on 100 random matrices."""
        for seed in range(100):
            size = 3 + seed % 10
            A = _random_spd(size, seed=seed, shift=10.0 ** -(1 + seed % 6))
            report = eigen_lower_bound(A)
            if report.certified:
                assert mpmath.mpf(report.lambda_min_lower) <= _exact_min_eig(A)

    @pytest.mark.slow
    def test_uniform_entries_sweep(self):
        """Sizes 5 to 40, uniform entries: sound, and within 1e-6 when well conditioned."""
        for seed in range(100):
            size = 5 + seed % 36
            rng = np.random.default_rng(1000 + seed)
            M = rng.uniform(-1.0, 1.0, (size, size))
            A = 0.5 * (M + M.T)
            A = A + (10.0 ** -(1 + seed % 5) - np.linalg.eigvalsh(A)[0]) * np.eye(size)
            A = 0.5 * (A + A.T)

            report = eigen_lower_bound(A)
            exact = _exact_min_eig(A)
            assert report.certified
            assert mpmath.mpf(report.lambda_min_lower) <= exact
            spectrum = np.abs(np.linalg.eigvalsh(A))
            if spectrum.max() / spectrum.min() <= 1e6:
                assert float(exact) - report.lambda_min_lower <= 1e-6


# =============================================================================
# ENCLOSED OBJECTIVE TESTS
# =============================================================================


class TestEnclosedObjective:
    """Tests for enclosures of F, its gradient and its Hessian."""

    def setup_method(self):
        self.V = TargetBasis.standard(3)
        self.W = xavier_init(3, 4, np.random.default_rng(12))

    def test_objective_agrees_with_float_path(self):
        """The enclosure is tight and sits on the float value."""
        enc = enclose_objective(self.W, self.V)
        value = objective_F(self.W, self.V)
        assert enc.width() < mpfr(2) ** -200
        assert abs(enc.mid_float() - value) < 1e-13

    def test_gradient_agrees_with_float_path(self):
        """Each gradient coordinate matches the float gradient."""
        enc = enclose_gradient(self.W, self.V)
        np.testing.assert_allclose(
            [e.mid_float() for e in enc], gradient_F(self.W, self.V).ravel(), atol=1e-13
        )
        norm = enclose_gradient_norm(self.W, self.V)
        assert norm.upper_float() == pytest.approx(np.linalg.norm(gradient_F(self.W, self.V)))

    def test_hessian_agrees_with_float_path(self):
        """Midpoints match hessian_F and the entries are tight."""
        enc = enclose_hessian(self.W, self.V)
        np.testing.assert_allclose(enc.midpoint(), hessian_F(self.W, self.V), atol=1e-12)
        assert enc.max_width() < mpfr(2) ** -200
        assert enc.entries[0, 5] is enc.entries[5, 0]

    def test_zero_neuron_rejected(self):
        """The objective needs nonzero neurons."""
        with pytest.raises(ZeroNeuronError):
            enclose_objective(np.array([[0.0, 0.0], [1.0, 1.0]]), TargetBasis.standard(2))

    def test_parallel_pair_refused(self):
        """Derivatives are refused when sin(theta) may vanish."""
        W = np.array([[1.0, 0.0], [2.0, 0.0]])
        with pytest.raises(SingularEnclosureError):
            enclose_hessian(W, TargetBasis.standard(2))

    def test_objective_defined_at_parallel_pairs(self):
        """F itself is continuous, so W = V is fine."""
        enc = enclose_objective(np.eye(2), TargetBasis.standard(2))
        assert enc.contains(0)
        assert enclose_objective(np.eye(3), TargetBasis.standard(3)).contains(0)


class TestBallBounds:
    """Tests for BallSpec, L_A and LH."""

    def test_ball_norms(self):
        """w_min and w_max enclose the extreme norms shifted by alpha."""
        W = WeightPoint([[3.0, 4.0], [0.0, 2.0]])
        ball = BallSpec.around(W, TargetBasis.standard(2), 0.5)
        assert ball.w_min.contains(1.5)
        assert ball.w_max.contains(5.5)
        assert ball.v_max.contains(1)

    def test_degenerate_ball(self):
        """A ball reaching the origin is refused."""
        with pytest.raises(DegenerateBallError):
            BallSpec.around(WeightPoint([[0.1, 0.0]]), TargetBasis.standard(2), 0.2)

    def test_bound_formulas(self):
        """L_A and LH match their closed forms for unit norms."""
        W = WeightPoint(np.eye(2))
        ball = BallSpec.around(W, TargetBasis.standard(2), 0.0)
        la = third_order_bound_LA(ball, k=2, n=2)
        lh = hessian_norm_bound_LH(ball, k=2, n=2)
        expected_la = 2 / math.pi * (math.sqrt(2) * 2 + 2)
        expected_lh = 0.5 + 2 * (1 / (2 * math.pi) + 0.5) + 4 / (2 * math.pi)
        assert la.mid_float() == pytest.approx(expected_la, rel=1e-14)
        assert lh.mid_float() == pytest.approx(expected_lh, rel=1e-14)

    def test_lh_bounds_hessian_norm(self):
        """LH at the point bounds the actual Hessian norm."""
        V = TargetBasis.standard(3)
        W = xavier_init(3, 3, np.random.default_rng(5))
        lh = hessian_norm_bound_LH(BallSpec.around(W, V, 0.0), k=3, n=3)
        assert np.max(np.abs(np.linalg.eigvalsh(hessian_F(W, V)))) <= lh.lower_float()

    def test_bounds_grow_with_alpha(self):
        """A larger ball never lowers L_A or LH."""
        V = TargetBasis.standard(3)
        W = xavier_init(3, 4, np.random.default_rng(9))
        smallest = float(W.neuron_norms().min())
        la, lh = [], []
        for alpha in (0.0, 1e-3 * smallest, 0.1 * smallest, 0.5 * smallest):
            ball = BallSpec.around(W, V, alpha)
            la.append(third_order_bound_LA(ball, k=3, n=4).upper_float())
            lh.append(hessian_norm_bound_LH(ball, k=3, n=4).upper_float())
        assert la == sorted(la)
        assert lh == sorted(lh)

    def test_lipschitz_on_sampled_pairs(self):
        """Sampled pairs in the ball respect L_A, and every Hessian respects LH."""
        V = TargetBasis.standard(3)
        rng = np.random.default_rng(31)
        W = xavier_init(3, 3, rng)
        alpha = 0.05 * float(W.neuron_norms().min())
        ball = BallSpec.around(W, V, alpha)
        la = third_order_bound_LA(ball, k=3, n=3).upper_float()
        lh = hessian_norm_bound_LH(ball, k=3, n=3).upper_float()

        def inside():
            u = rng.standard_normal(W.W.shape)
            return W.W + alpha * rng.uniform() * u / np.linalg.norm(u)

        for _ in range(50):
            A, B = inside(), inside()
            norm_a = spectral_norm(hessian_F(A, V))
            norm_b = spectral_norm(hessian_F(B, V))
            assert abs(norm_a - norm_b) <= la * np.linalg.norm(A - B) + 1e-12
            assert norm_a <= lh and norm_b <= lh


class TestPrecisionRetry:
    """Tests for the precision-doubling retry."""

    def test_schedule(self):
        """Precision doubles up to the cap."""
        assert precision_schedule(256, 4096) == [256, 512, 1024, 2048, 4096]
        assert precision_schedule(256, 300) == [256]

    def test_retries_until_resolved(self):
        """Indeterminate results are retried at doubled precision."""
        seen = []

        def compute(bits):
            seen.append(bits)
            if bits < 1024:
                raise IndeterminateEnclosureError("still overlapping")
            return bits

        assert with_precision_retry(compute, 256) == 1024
        assert seen == [256, 512, 1024]

    def test_gives_up_at_cap(self):
        """The last IndeterminateEnclosureError propagates."""

        def compute(bits):
            raise IndeterminateEnclosureError(f"at {bits}")

        with pytest.raises(IndeterminateEnclosureError, match="at 512"):
            with_precision_retry(compute, 256, max_precision=512)
