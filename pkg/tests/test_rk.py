import math
from fractions import Fraction

import numpy as np
import pytest
from numpy.polynomial import Polynomial

from rkcert import catalog
from rkcert.errors import InconsistentSchemeError, NotExplicitError
from rkcert.linalg import Truth
from rkcert.rk import (
    ButcherTableau,
    StabilityPolynomial,
    condition_c,
    condition_thm25,
    eval_poly,
    eval_poly_matrix,
    ks_indicators,
    linear_order,
    stability_polynomial,
)


def expand_recursion(t: ButcherTableau) -> np.ndarray:
    """Oracle: run the stage recursion on the scalar problem u' = z u with polynomial arithmetic."""
    z = Polynomial([0.0, 1.0])
    k = []
    for i in range(t.s):
        y = Polynomial([1.0]) + sum((t.a[i, j] * k[j] for j in range(i)), Polynomial([0.0]))
        k.append(z * y)
    r = Polynomial([1.0]) + sum((t.b[i] * k[i] for i in range(t.s)), Polynomial([0.0]))
    return r.coef


def random_tableau(rng, s):
    a = np.tril(rng.standard_normal((s, s)), -1)
    return ButcherTableau(a, rng.standard_normal(s))


class TestStabilityPolynomial:
    def test_euler(self):
        np.testing.assert_allclose(catalog.scheme("euler").d, [1, 1])

    def test_rk4_is_truncated_exponential(self):
        np.testing.assert_allclose(catalog.scheme("rk4").d, [1, 1, 1 / 2, 1 / 6, 1 / 24], rtol=1e-15)

    @pytest.mark.parametrize("seed", range(5))
    def test_random_five_stage_matches_expansion(self, seed):
        t = random_tableau(np.random.default_rng(seed), 5)
        oracle = expand_recursion(t)
        np.testing.assert_allclose(stability_polynomial(t).d, oracle[: np.flatnonzero(oracle)[-1] + 1], rtol=1e-13)

    def test_rejects_implicit(self):
        with pytest.raises(NotExplicitError):
            ButcherTableau([[0.5]], [1.0])

    def test_complex_tableau(self):
        t = ButcherTableau([[0, 0], [0.5 + 0.5j, 0]], [0.5, 0.5])
        poly = stability_polynomial(t)
        assert not poly.is_real
        assert poly.d[2] == pytest.approx(0.25 + 0.25j)


class TestOrder:
    def test_truncated_exponential(self):
        assert StabilityPolynomial.truncated_exponential(4).p == 4

    def test_perturbed_third_coefficient(self):
        assert linear_order(StabilityPolynomial([1, 1, 0.5, 0.3])) == 2

    @pytest.mark.parametrize("name, p", [("euler", 1), ("heun2", 2), ("heun3", 3), ("kutta3", 3), ("rk4", 4)])
    def test_catalog(self, name, p):
        assert catalog.scheme(name).p == p

    def test_inconsistent(self):
        with pytest.raises(InconsistentSchemeError):
            StabilityPolynomial([0.9, 1.0])

    def test_ambiguity_band_flagged(self):
        poly = StabilityPolynomial.from_c([1, 1, 1, 1 + 1e-8])
        assert poly.p == 2 and poly.order_ambiguous
        assert not catalog.scheme("rk4").order_ambiguous


class TestIndicators:
    def test_rk4(self):
        ind = ks_indicators(catalog.scheme("rk4"))
        assert ind.delta == pytest.approx(5.0, abs=1e-12) and ind.gamma is None

    def test_euler(self):
        assert ks_indicators(catalog.scheme("euler")).gamma == pytest.approx(-1.0, abs=1e-12)

    def test_p2_s2(self):
        assert ks_indicators(catalog.scheme("texp2")).delta == pytest.approx(-3.0, abs=1e-12)


class TestConditionC:
    @pytest.mark.parametrize(
        "name, value, holds",
        [("rk4", -5.0, Truth.TRUE), ("texp3", 1.0, Truth.FALSE), ("texp2", 3.0, Truth.FALSE)],
    )
    def test_examples(self, name, value, holds):
        cond = condition_c(catalog.scheme(name))
        assert cond.value == pytest.approx(value, abs=1e-12)
        assert cond.holds is holds

    def test_even_formula_uses_central_binomial(self):
        poly = StabilityPolynomial.from_c([1] * 7 + [0.5])  # p = 6, c_7 = 0.5
        expected = 1 + (-1) ** 3 * (0.5 - 1) * math.comb(6, 3)
        assert condition_c(poly).value == pytest.approx(expected)

    def test_marginal(self):
        # p = 2 with 1 - (c_3 - 1) * 2 = 0 exactly at c_3 = 1.5
        assert condition_c(StabilityPolynomial.from_c([1, 1, 1, 1.5])).holds is Truth.MARGINAL


class TestThm25:
    @pytest.mark.parametrize("name, holds", [("rk4", Truth.TRUE), ("texp2", Truth.TRUE), ("texp3", Truth.FALSE)])
    def test_examples(self, name, holds):
        assert condition_thm25(catalog.scheme(name)) is holds


class TestEvaluation:
    def test_scalar(self):
        assert eval_poly(catalog.scheme("rk4"), 0) == 1
        assert eval_poly(catalog.scheme("euler"), -2) == -1

    def test_rk4_matrix_matches_stage_recursion(self, sunshu):
        rk4 = catalog.TABLEAUX["rk4"]
        got = eval_poly_matrix(catalog.scheme("rk4"), sunshu, 0.1)
        cols = [rk4.step(sunshu, 0.1, e) for e in np.eye(3, dtype=complex)]
        np.testing.assert_allclose(got, np.column_stack(cols), rtol=1e-14, atol=1e-15)

    def test_zero_degree(self):
        poly = StabilityPolynomial([1.0])
        assert poly.p == 0
        np.testing.assert_array_equal(eval_poly_matrix(poly, np.ones((2, 2))), np.eye(2))


def _modulus_excess(c, theta: Fraction) -> Fraction:
    """|R(i theta)|^2 - 1 in exact rational arithmetic.

    Catalog coefficients are rationals; they are recovered exactly from the
    floats, since binary rounding of 1/j! would swamp theta^(p+1) at p = 7.
    """
    re, im = Fraction(0), Fraction(0)
    for j, cj in enumerate(c):
        term = Fraction(float(cj)).limit_denominator(10**6) / math.factorial(j) * theta**j
        re, im = (re + term, im) if j % 4 == 0 else (re, im + term) if j % 4 == 1 else (re - term, im) if j % 4 == 2 else (re, im - term)
    return re * re + im * im - 1


@pytest.mark.parametrize("name", ["euler", "heun3", "kutta3", "texp3", "texp5", "texp7"])
def test_scalar_modulus_expansion_sign(name):
    # |R(i theta)|^2 - 1 = 2 g theta^(p+1) + O(theta^(p+3)); Richardson removes the theta^2 correction
    poly = catalog.scheme(name)
    p = poly.p
    t1, t2 = Fraction(1, 100), Fraction(1, 1000)
    g1 = _modulus_excess(poly.c, t1) / t1 ** (p + 1)
    g2 = _modulus_excess(poly.c, t2) / t2 ** (p + 1)
    g = (g2 * t1**2 - g1 * t2**2) / (t1**2 - t2**2) / 2
    gamma = ks_indicators(poly).gamma
    assert np.sign(float(g)) == -np.sign(gamma)
    assert float(g) == pytest.approx(-gamma / math.factorial(p + 1), rel=1e-6)
