import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opuctoda.series import TruncatedSeries, WindowUnderflowError, binomial_series, divide


def poly(coeffs, lo=0):
    return TruncatedSeries(lo, coeffs)


class TestArithmetic:
    def test_difference_of_squares(self):
        f = poly([1, 1]) * poly([1, -1])
        assert f.coeff(0) == 1 and f.coeff(1) == 0 and f.coeff(2) == -1

    def test_mul_identity(self):
        f = poly([3, -2, 5], lo=-1)
        g = f * TruncatedSeries.one()
        assert g == f

    def test_truncated_square_of_ones(self):
        # hand Cauchy product: (sum z^n, n=0..5)^2 has coefficients 1..6 on n=0..5
        ones = TruncatedSeries(0, [1] * 6, exact_above=False)
        sq = ones * ones
        assert sq.window == (0, 5)
        assert sq.coeffs == [1, 2, 3, 4, 5, 6]
        assert not sq.exact_above

    def test_mul_commutes_and_associates(self):
        rng = np.random.default_rng(7)
        a = poly(list(rng.normal(size=4) + 1j * rng.normal(size=4)))
        b = poly(list(rng.normal(size=3) + 1j * rng.normal(size=3)), lo=-2)
        c = poly(list(rng.normal(size=5)))
        ab = a * b
        ba = b * a
        assert ab.window == ba.window
        assert np.allclose(ab.coeffs, ba.coeffs, rtol=1e-13, atol=0)
        lhs = (a * b) * c
        rhs = a * (b * c)
        assert lhs.window == rhs.window
        scale = max(abs(np.asarray(lhs.coeffs, dtype=complex)))
        assert np.allclose(lhs.coeffs, rhs.coeffs, rtol=1e-13, atol=1e-13 * scale)

    def test_window_shrink_records_truncation(self):
        trunc = TruncatedSeries(0, [1, 1, 1], exact_above=False)  # known to z^2 only
        p = poly([1, 1])  # exact polynomial
        prod = trunc * p
        # unknown z^3-and-up data of trunc pollutes products beyond 2 + 0
        assert prod.window[1] == 2
        with pytest.raises(WindowUnderflowError):
            prod.coeff(3)

    def test_window_underflow(self):
        a = TruncatedSeries(0, [1, 1], exact_above=False)
        b = TruncatedSeries(5, [1], exact_below=False)
        with pytest.raises(WindowUnderflowError):
            a + b

    def test_scale(self):
        f = poly([1, 2]).scale(Fraction(1, 3))
        assert f.coeffs == [Fraction(1, 3), Fraction(2, 3)]


class TestStar:
    def test_definition_single_term(self):
        f = TruncatedSeries.monomial(1j, 1)
        g = f.star()
        assert g.window == (-1, -1)
        assert g.coeff(-1) == -1j

    @given(
        st.lists(
            st.tuples(st.floats(-5, 5), st.floats(-5, 5)).map(lambda t: complex(*t)),
            min_size=1,
            max_size=8,
        ),
        st.integers(-4, 4),
    )
    @settings(max_examples=50, deadline=None)
    def test_involution(self, coeffs, lo):
        f = TruncatedSeries(lo, coeffs)
        g = f.star().star()
        assert g.window == f.window
        assert g.coeffs == f.coeffs

    def test_grid_conjugation_identity(self):
        rng = np.random.default_rng(3)
        f = poly(list(rng.normal(size=6) + 1j * rng.normal(size=6)), lo=-2)
        fs = f.star()
        for theta in np.linspace(0, 2 * np.pi, 17):
            z = np.exp(1j * theta)
            assert abs(fs.eval_at(z) - np.conj(f.eval_at(z))) < 1e-12

    def test_star_preserves_exactness(self):
        f = TruncatedSeries(0, [Fraction(1, 2), Fraction(1, 3)])
        assert f.star().is_exact_mode()


class TestBinomialSeries:
    def test_geometric(self):
        s = binomial_series(1, 6, exact=True)
        assert s.coeffs == [1] * 7

    def test_derivative_of_geometric(self):
        s = binomial_series(2, 5, exact=True)
        assert s.coeffs == [1, 2, 3, 4, 5, 6]

    def test_half(self):
        s = binomial_series(Fraction(1, 2), 3, exact=True)
        assert s.coeffs == [1, Fraction(1, 2), Fraction(3, 8), Fraction(5, 16)]

    def test_square_of_half_is_geometric(self):
        h = binomial_series(Fraction(1, 2), 10, exact=True)
        assert (h * h).coeffs == binomial_series(1, 10, exact=True).coeffs

    def test_exponent_addition(self):
        a = binomial_series(Fraction(2, 3), 8, exact=True)
        b = binomial_series(Fraction(4, 3), 8, exact=True)
        ab = a * b
        c = binomial_series(2, 8, exact=True)
        assert ab.coeffs == c.coeffs

    def test_domain_error(self):
        with pytest.raises(ValueError):
            binomial_series(0, 3)
        with pytest.raises(ValueError):
            binomial_series(-1.5, 3)

    def test_gamma_ratio_values(self):
        # coefficient n equals Gamma(m+n)/(Gamma(m) n!)
        m = 0.7
        s = binomial_series(m, 12)
        for n in range(13):
            ref = math.exp(math.lgamma(m + n) - math.lgamma(m) - math.lgamma(n + 1))
            assert abs(s.coeff(n) - ref) < 1e-13 * max(1.0, ref)


class TestEval:
    def test_constant(self):
        assert TruncatedSeries.one().eval_angle(1.234) == 1

    def test_cosine_identity(self):
        f = TruncatedSeries(-1, [1, 0, 1])  # z^{-1} + z
        assert abs(f.eval_angle(0.0) - 2) < 1e-15

    def test_truncated_geometric_at_pi(self):
        # oracle: partial sum (1 - z^{N+1})/(1 - z) at z = -1; for N = 50 this
        # is exactly 1, and successive truncations bracket the limit 1/2
        s50 = binomial_series(1, 50)
        s49 = binomial_series(1, 49)
        z = np.exp(1j * np.pi)
        oracle = (1 - z ** 51) / (1 - z)
        assert abs(s50.eval_angle(np.pi) - oracle) < 1e-12
        assert abs(s50.eval_angle(np.pi) - 1.0) < 1e-12
        avg = 0.5 * (s50.eval_angle(np.pi) + s49.eval_angle(np.pi))
        assert abs(avg - 0.5) < 1e-12

    def test_truncated_geometric_interior_convergence(self):
        # away from the boundary singularity the truncation really converges
        s = binomial_series(1, 200)
        z = 0.7 * np.exp(1j * 2.1)
        assert abs(s.eval_at(z) - 1.0 / (1.0 - z)) < 1e-12

    def test_window_away_from_zero(self):
        # windows starting above 0 and below -1 carry their z^lo factor
        f = TruncatedSeries(2, [3.0, -1.0])  # 3z^2 - z^3
        z = 0.8 * np.exp(0.9j)
        assert abs(f.eval_at(z) - (3 * z ** 2 - z ** 3)) < 1e-14
        g = TruncatedSeries(-5, [2.0, 1.0])  # 2z^-5 + z^-4
        assert abs(g.eval_at(z) - (2 * z ** -5 + z ** -4)) < 1e-12

    def test_vectorized_matches_scalar(self):
        f = poly([1.0, 2.0, -1.0, 0.5j], lo=-2)
        thetas = np.linspace(0, 2 * np.pi, 9)
        vec = f.eval_angle(thetas)
        for t, v in zip(thetas, vec):
            assert abs(f.eval_angle(float(t)) - v) < 1e-14


class TestDivide:
    def test_geometric_from_division(self):
        one = TruncatedSeries.one()
        den = TruncatedSeries(0, [1, -1])
        q = divide(one, den, 6)
        assert q.coeffs == [1] * 7

    def test_exact_division_roundtrip(self):
        num = TruncatedSeries(0, [Fraction(1), Fraction(1, 3), Fraction(2, 5)])
        den = TruncatedSeries(0, [Fraction(2), Fraction(-1, 7)])
        q = divide(num, den, 8)
        back = q * den
        for n in range(9):
            assert back.coeff(n) == (num.coeff(n) if n <= 2 else 0)

    def test_breakdown(self):
        with pytest.raises(ZeroDivisionError):
            divide(TruncatedSeries.one(), TruncatedSeries(1, [1]), 3)


class TestSerialization:
    def test_json_roundtrip(self):
        f = poly([1 + 2j, -0.5], lo=-1)
        obj = f.to_json_obj()
        g = TruncatedSeries.from_json_obj(obj)
        assert g.window == f.window
        assert np.allclose(g.coeffs, f.coeffs)

    def test_csv_rows(self):
        f = poly([1, 2j])
        assert f.to_csv_rows() == [(0, 1.0, 0.0), (1, 0.0, 2.0)]
