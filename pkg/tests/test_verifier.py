import math

import numpy as np
import pytest

from rkcert import catalog
from rkcert.classifier import Conclusion, classify_pair
from rkcert.errors import InputError, InsufficientDataError
from rkcert.hypocoercivity import hc_index_definitional, witness_vector
from rkcert.instances import make_rng, structured_instance
from rkcert.linalg import (
    adjoint,
    hermitian_split,
    matrix_exponential,
    psd_sqrt,
    solve_lyapunov,
    spectral_norm,
    transform_to_dissipative,
)
from rkcert.rk import eval_poly_matrix
from rkcert.verifier import (
    TOL_VIOL,
    counterexample_search,
    default_grid,
    exp_norm_deficit,
    fit_exp_norm_exponent,
    fit_short_time_exponent,
    gram_defect,
    norm_sweep,
    quadratic_form_identity,
    violation_threshold,
    witness_identity,
)

RK4 = catalog.scheme("rk4")
FIXTURES = ["sunshu", "levytadmor", "minus-identity", "hc1"]


class TestNormSweep:
    def test_rk4_sunshu_violates(self, sunshu):
        sweep = norm_sweep(RK4, sunshu, np.logspace(-4, -1, 100))
        assert sweep.first_violation is not None
        tau, nrm = sweep.first_violation
        assert nrm > 1 + TOL_VIOL
        assert spectral_norm(eval_poly_matrix(RK4, sunshu, tau)) > 1

    def test_rk4_sunshu_weighted_clean(self, sunshu, ww_star):
        assert norm_sweep(RK4, sunshu, np.logspace(-4, -1, 100), ww_star).first_violation is None

    def test_euler_scalar(self):
        grid = np.linspace(0.01, 1.99, 50)
        sweep = norm_sweep(catalog.scheme("euler"), np.array([[-1.0]]), grid)
        assert sweep.first_violation is None
        np.testing.assert_allclose(sweep.norms, np.abs(1 - grid), rtol=0, atol=1e-14)

    def test_norms_match_direct_computation(self, sunshu):
        grid = np.logspace(-3, 0, 7)
        sweep = norm_sweep(RK4, sunshu, grid)
        direct = [spectral_norm(eval_poly_matrix(RK4, sunshu, t)) for t in grid]
        np.testing.assert_allclose(sweep.norms, direct, rtol=1e-14)

    def test_weighted_transform_identity(self, sunshu, ww_star):
        grid = default_grid(sunshu, 50)
        weighted = norm_sweep(RK4, sunshu, grid, ww_star)
        hat = norm_sweep(RK4, transform_to_dissipative(sunshu, ww_star), grid)
        np.testing.assert_allclose(weighted.norms, hat.norms, rtol=0, atol=1e-10)
        assert weighted.weighted and not hat.weighted

    @pytest.mark.parametrize("grid", [[], [0.1, 0.01], [-1.0, 1.0]])
    def test_bad_grid(self, sunshu, grid):
        with pytest.raises(InputError):
            norm_sweep(RK4, sunshu, grid)

    def test_weight_not_hpd(self, sunshu):
        with pytest.raises(InputError):
            norm_sweep(RK4, sunshu, None, -np.eye(3))

    def test_threshold(self, sunshu):
        sweep = norm_sweep(RK4, sunshu, np.logspace(-6, -1, 200))
        assert 0 < sweep.threshold < sweep.first_violation[0]


class TestCounterexample:
    def test_rk4_sunshu(self, sunshu):
        cex = counterexample_search(RK4, sunshu)
        assert cex is not None and cex.growth > TOL_VIOL
        r = eval_poly_matrix(RK4, sunshu, cex.tau)
        assert np.linalg.norm(r @ cex.u) / np.linalg.norm(cex.u) - 1 == pytest.approx(cex.growth, rel=1e-4)

    def test_rk4_minus_identity(self):
        assert counterexample_search(RK4, -np.eye(3)) is None

    def test_heun3_levytadmor_has_clean_window(self, levytadmor):
        # no counterexample below the detected threshold; the threshold itself is recorded
        thr = violation_threshold(catalog.scheme("heun3"), levytadmor, np.logspace(-6, 0, 200))
        assert thr > 0
        assert counterexample_search(catalog.scheme("heun3"), levytadmor, np.logspace(-6, math.log10(thr), 100)) is None


class TestExponentFit:
    @pytest.mark.parametrize("name, a, tol", [("minus-identity", 1, 0.05), ("hc1", 3, 0.1), ("sunshu", 5, 0.15), ("levytadmor", 9, 0.3)])
    def test_fixtures(self, name, a, tol):
        fit = fit_exp_norm_exponent(catalog.matrix(name))
        assert fit.a_hat == pytest.approx(a, abs=tol)
        assert fit.points >= 4

    def test_deficit_accurate_at_tiny_steps(self):
        assert exp_norm_deficit(-np.eye(2), 1e-13) == pytest.approx(-math.expm1(-1e-13), rel=1e-12)

    def test_deficit_against_dense_exponential(self, sunshu):
        for t in (0.05, 0.5):
            assert 1 - exp_norm_deficit(sunshu, t) == pytest.approx(spectral_norm(matrix_exponential(sunshu, t)), rel=1e-13)

    def test_scalar_function(self):
        fit = fit_short_time_exponent(lambda t: 1 - 3 * t**2, (1e-5, 1e-2))
        # 1 - f loses ~1e-16 / 3e-10 to cancellation at the small end
        assert fit.a_hat == pytest.approx(2, abs=1e-6) and fit.c_hat == pytest.approx(3, rel=1e-5)

    def test_insufficient_points(self):
        with pytest.raises(InsufficientDataError):
            fit_short_time_exponent(lambda t: 1.0, (1e-3, 1e-1))

    def test_zero_matrix(self):
        with pytest.raises(InsufficientDataError):
            fit_exp_norm_exponent(np.zeros((2, 2)))


class TestGramDefect:
    def test_rk4_sunshu(self, sunshu):
        gd = gram_defect(RK4, sunshu)
        assert gd.fitted_order == pytest.approx(5, abs=0.1)
        l5 = np.linalg.matrix_power(sunshu, 5)
        oracle = spectral_norm(l5 + adjoint(l5)) / math.factorial(5)
        assert gd.measured_coefficient == pytest.approx(oracle, rel=0.1)
        assert gd.series_coefficient == pytest.approx(oracle, rel=1e-10)
        assert not gd.degenerate

    def test_zero_matrix(self):
        gd = gram_defect(RK4, np.zeros((3, 3)), np.logspace(-3, -1, 5))
        assert gd.degenerate and np.all(gd.defect_norms == 0)

    def test_euler_rotation(self):
        gd = gram_defect(catalog.scheme("euler"), catalog.matrix("skew2"))
        assert gd.fitted_order == pytest.approx(2, abs=0.1)


class TestQuadraticForm:
    def test_sunshu(self, sunshu):
        chk = witness_identity(sunshu, 2)
        assert chk.match and abs(chk.lhs) > 1
        assert chk.lhs == pytest.approx(chk.rhs, rel=1e-8)
        assert chk.full_power_norm_sq == pytest.approx(-chk.rhs / 2, rel=1e-8)

    def test_minus_identity_level0(self):
        chk = quadratic_form_identity(-np.eye(3), np.eye(3)[0], 0)
        assert chk.lhs == pytest.approx(-2) and chk.rhs == pytest.approx(-2) and chk.match

    def test_index_one(self):
        m = catalog.matrix("hc1")
        assert witness_identity(m, 1).match

    def test_bad_witness(self, sunshu):
        with pytest.raises(InputError):
            quadratic_form_identity(sunshu, np.ones(3), 2)

    @pytest.mark.parametrize("seed", range(5))
    def test_random(self, seed):
        rng = make_rng(seed)
        k = int(rng.integers(1, 4))
        m = structured_instance(int(rng.integers(k + 1, 9)), k, rng)
        assert hc_index_definitional(m).m_hc == k
        chk = witness_identity(m, k)
        assert chk.match


def _pairs(conclusion, mats):
    return [
        (name, mat)
        for mat in mats
        for name in catalog.scheme_names()
        if classify_pair(catalog.scheme(name), catalog.matrix(mat)).conclusion is conclusion
    ]


@pytest.mark.parametrize("scheme, mat", _pairs(Conclusion.NO, ["sunshu", "levytadmor"]))
def test_no_pairs_have_counterexamples(scheme, mat):
    # violation amplitudes scale like (tau ||L||)^(p+1); the grid reaches 1e-6 at the low end
    # and 10 / ||L|| at the top so high-order schemes clear TOL_VIOL
    m = catalog.matrix(mat)
    grid = np.logspace(-6, 1, 200) / spectral_norm(m)
    assert counterexample_search(catalog.scheme(scheme), m, grid) is not None


@pytest.mark.parametrize("scheme, mat", _pairs(Conclusion.YES, FIXTURES))
def test_yes_pairs_have_positive_threshold(scheme, mat):
    assert violation_threshold(catalog.scheme(scheme), catalog.matrix(mat)) > 0


@pytest.mark.parametrize("mat", FIXTURES)
@pytest.mark.parametrize("scheme", catalog.scheme_names())
def test_lyapunov_weight_certifies(scheme, mat):
    m = catalog.matrix(mat)
    assert norm_sweep(catalog.scheme(scheme), m, None, solve_lyapunov(m)).first_violation is None


def test_witness_reaches_identity_on_quadratic_form(sunshu):
    u = witness_vector(sunshu, 2)
    h, s = hermitian_split(sunshu)
    top = psd_sqrt(-h) @ s @ s @ u
    assert quadratic_form_identity(sunshu, u, 2).rhs == pytest.approx(-2 * np.vdot(top, top).real)
