import math

import numpy as np
import pytest
from scipy import integrate

from branching_ou.kernels import Factor, Kernel, ProductFunc
from branching_ou.limits import (
    CenteringError,
    GaussianFamily,
    NonPolynomialError,
    RegimeError,
    critical_limit_sampler,
    default_fast_horizon,
    enumerate_diagrams,
    fast_limit_sampler,
    grad_density_pairing,
    h_polynomial_value,
    involution_number,
    sigma_critical,
    sigma_slow,
    slow_limit_sampler,
)
from branching_ou.model import ModelParams
from branching_ou.ou import FUNC_ONE, FUNC_X, Func1D
from branching_ou.simulator import Caps

from helpers import mean_se, phi_quad, semigroup_quad, var_se

SLOW = ModelParams(lam=1.0, p=0.75, mu=1.0, sigma=1.0)
CRIT = ModelParams(lam=1.0, p=0.75, mu=0.25, sigma=1.0)
FAST = ModelParams(lam=1.0, p=0.75, mu=0.1, sigma=1.0)

X2 = Func1D.polynomial([0.0, 0.0, 1.0])


def kernel_xx(symmetric=True):
    return Kernel.from_slot_funcs([FUNC_X, FUNC_X], symmetric=symmetric)


def factor_of(func):
    from branching_ou.kernels import factor_1d

    return factor_1d(func)


class TestDiagrams:
    def test_counts_small(self):
        assert len(enumerate_diagrams(2)) == 2
        assert len(enumerate_diagrams(3)) == 4
        assert len(enumerate_diagrams(4)) == 10

    def test_involution_recurrence(self):
        for n in range(8 + 1):
            got = len(enumerate_diagrams(n))
            assert got == involution_number(n)
            assert got == len({(d.edges, d.unpaired) for d in enumerate_diagrams(n)})

    def test_edges_disjoint_and_partitioning(self):
        for d in enumerate_diagrams(5):
            seen = [i for e in d.edges for i in e]
            assert len(seen) == len(set(seen))
            assert sorted(seen + list(d.unpaired)) == list(range(1, 6))
            assert d.rank == len(d.edges)

    def test_cap(self):
        with pytest.raises(ValueError):
            enumerate_diagrams(9)


class TestSigmaSlow:
    def test_linear_kernel_closed_form(self):
        assert sigma_slow(FUNC_X, SLOW) == pytest.approx(1.0, abs=1e-10)

    def test_constant_kernel(self):
        assert sigma_slow(FUNC_ONE, SLOW) == pytest.approx(0.0, abs=1e-12)

    def test_strong_reversion_limit_direction(self):
        params = ModelParams(lam=1.0, p=0.75, mu=40.0, sigma=1.0)
        stat_var = 1.0 / 80.0
        val = sigma_slow(FUNC_X, params)
        assert abs(val - stat_var) <= 0.05 * stat_var

    def test_against_scipy_nested_quadrature(self):
        coeffs = [0.0, 1.0, 0.5, -0.2]
        f = Func1D.polynomial(coeffs)
        poly = np.polynomial.polynomial.Polynomial(coeffs)
        mean = phi_quad(poly, SLOW)
        centered = lambda x: poly(x) - mean

        def evolved_sq_mean(s):
            return phi_quad(
                lambda x: semigroup_quad(centered, s, x, SLOW) ** 2, SLOW
            )

        integral, _ = integrate.quad(
            lambda s: math.exp(0.5 * s) * evolved_sq_mean(s), 0.0, 40.0, limit=80
        )
        want = phi_quad(lambda x: centered(x) ** 2, SLOW) + 1.5 * integral
        assert sigma_slow(f, SLOW) == pytest.approx(want, rel=1e-6)

    def test_regime_error(self):
        with pytest.raises(RegimeError):
            sigma_slow(FUNC_X, FAST)


class TestSigmaCritical:
    def test_linear_kernel(self):
        assert sigma_critical(FUNC_X, CRIT) == pytest.approx(3.0, abs=1e-10)

    def test_even_kernel_vanishes(self):
        assert sigma_critical(X2, CRIT) == pytest.approx(0.0, abs=1e-12)

    def test_constant(self):
        assert sigma_critical(FUNC_ONE, CRIT) == pytest.approx(0.0, abs=1e-14)

    def test_gradient_pairing_value(self):
        fac = Factor.from_polys([[0.0, 1.0]])
        assert grad_density_pairing(fac, 1, CRIT) == pytest.approx(-1.0, abs=1e-12)

    def test_regime_error(self):
        with pytest.raises(RegimeError):
            sigma_critical(FUNC_X, SLOW)


class TestGaussianFamily:
    def test_psd_clip(self):
        cov = np.array([[1.0, 1.0], [1.0, 1.0 - 1e-13]])
        fam = GaussianFamily.from_covariance(cov)
        draws = fam.sample(np.random.default_rng(0), 2000)
        assert np.allclose(draws[:, 0], draws[:, 1], atol=1e-5)

    def test_rejects_indefinite(self):
        with pytest.raises(ValueError):
            GaussianFamily.from_covariance(np.array([[1.0, 2.0], [2.0, 1.0]]))


class TestSlowSampler:
    def test_order_one_matches_sigma(self):
        rng = np.random.default_rng(101)
        f = Kernel.from_slot_funcs([FUNC_X], symmetric=True)
        draws = slow_limit_sampler(f, SLOW, rng, size=100_000)
        var, se = var_se(draws)
        assert abs(var - 1.0) <= 3 * se

    def test_order_two_mean_is_pair_integral(self):
        # L(h (x) h) = G^2 - <h^2, phi>; its mean equals the positive time
        # integral 2 lam p int e^{gs} <phi, (T_s h)^2> ds = 0.5 here
        rng = np.random.default_rng(103)
        draws = slow_limit_sampler(kernel_xx(), SLOW, rng, size=200_000)
        mean, se = mean_se(draws)
        assert abs(mean - 0.5) <= 4 * se

    def test_multi_term_mean(self):
        # f = x (x) x + 2 (x^2 - 1/2) (x) (x^2 - 1/2): the two factor
        # families are uncorrelated, so the limit means add:
        # 0.5 + 2 * (3 / 14)
        centered_sq = Func1D.polynomial([-0.5, 0.0, 1.0])
        f = Kernel.tensor_sum(
            [
                (1.0, (factor_of(FUNC_X), factor_of(FUNC_X))),
                (2.0, (factor_of(centered_sq), factor_of(centered_sq))),
            ],
            dim=1, symmetric=True,
        )
        rng = np.random.default_rng(211)
        draws = slow_limit_sampler(f, SLOW, rng, size=150_000)
        mean, se = mean_se(draws)
        assert abs(mean - (0.5 + 2.0 * 3.0 / 14.0)) <= 4 * se

    def test_duplicate_terms_are_perfectly_correlated(self):
        # two identical tensor terms must draw the same Gaussian values, so
        # the sample is 2 (G^2 - 1/2): mean 1, variance 8, support floor -1
        f = Kernel.tensor_sum(
            [
                (1.0, (factor_of(FUNC_X), factor_of(FUNC_X))),
                (1.0, (factor_of(FUNC_X), factor_of(FUNC_X))),
            ],
            dim=1, symmetric=True,
        )
        rng = np.random.default_rng(223)
        draws = slow_limit_sampler(f, SLOW, rng, size=100_000)
        mean, se_m = mean_se(draws)
        var, se_v = var_se(draws)
        assert abs(mean - 1.0) <= 4 * se_m
        assert abs(var - 8.0) <= 4 * se_v
        assert draws.min() >= -1.0 - 1e-9

    def test_order_three_diagram_sum(self):
        # f = x (x) x (x) x: the signed diagram sum collapses to
        # G^3 - 3 <x^2, phi> G with Var G = 1, whose variance is 8.25
        f = Kernel.from_slot_funcs([FUNC_X, FUNC_X, FUNC_X], symmetric=True)
        rng = np.random.default_rng(227)
        draws = slow_limit_sampler(f, SLOW, rng, size=200_000)
        mean, se_m = mean_se(draws)
        var, se_v = var_se(draws)
        assert abs(mean) <= 4 * se_m
        assert abs(var - 8.25) <= 4 * se_v

    def test_order_two_matches_analytic_law(self):
        # for f = x (x) x the limit is G^2 - <x^2, phi> with Var G = 1, so
        # its CDF is the unit chi-square CDF shifted by the stationary
        # second moment
        from scipy import stats as sstats

        rng = np.random.default_rng(42)
        draws = slow_limit_sampler(kernel_xx(), SLOW, rng, size=200_000)
        ks = sstats.kstest(draws, lambda y: sstats.chi2.cdf(y + 0.5, df=1))
        assert ks.pvalue > 0.01

    def test_zero_kernel(self):
        f = Kernel.tensor_sum(
            [(0.0, (Factor.constant(1.0, 1), Factor.constant(1.0, 1)))], dim=1
        )
        draws = slow_limit_sampler(f, SLOW, np.random.default_rng(1), size=10)
        assert np.all(draws == 0.0)

    def test_non_canonical_rejected(self):
        f = Kernel.from_slot_funcs([X2, X2], symmetric=True)
        with pytest.raises(CenteringError):
            slow_limit_sampler(f, SLOW, np.random.default_rng(1))

    def test_regime_error(self):
        with pytest.raises(RegimeError):
            slow_limit_sampler(kernel_xx(), CRIT, np.random.default_rng(1))


class TestCriticalSampler:
    def test_order_one_variance(self):
        rng = np.random.default_rng(107)
        f = Kernel.from_slot_funcs([FUNC_X], symmetric=True)
        draws = critical_limit_sampler(f, CRIT, rng, size=100_000)
        var, se = var_se(draws)
        assert abs(var - 3.0) <= 3 * se

    def test_order_two_mean(self):
        rng = np.random.default_rng(109)
        draws = critical_limit_sampler(kernel_xx(), CRIT, rng, size=100_000)
        mean, se = mean_se(draws)
        assert abs(mean - 3.0) <= 4 * se

    def test_two_dim_additive_kernel(self):
        # f(x) = x_1 + x_2: gradient pairings are -1 per coordinate, so the
        # asymptotic variance doubles the 1-D value
        params2 = ModelParams(lam=1.0, p=0.75, mu=0.25, sigma=1.0, dim=2,
                              x0=(0.0, 0.0))
        fac = Factor((
            (1.0, ProductFunc((FUNC_X, FUNC_ONE))),
            (1.0, ProductFunc((FUNC_ONE, FUNC_X))),
        ))
        assert sigma_critical(fac, params2) == pytest.approx(6.0, abs=1e-10)
        f = Kernel.tensor_sum([(1.0, (fac,))], dim=2, symmetric=True)
        draws = critical_limit_sampler(f, params2, np.random.default_rng(17),
                                       size=100_000)
        var, se = var_se(draws)
        assert abs(var - 6.0) <= 3 * se

    def test_even_factor_degenerate(self):
        centered_sq = Func1D.polynomial([-2.0, 0.0, 1.0])  # x^2 - stat_var
        f = Kernel.from_slot_funcs([centered_sq], symmetric=True)
        draws = critical_limit_sampler(f, CRIT, np.random.default_rng(3), size=50)
        assert np.allclose(draws, 0.0)

    def test_uncentered_factor_rejected(self):
        f = Kernel.from_slot_funcs([X2, X2], symmetric=True)
        with pytest.raises(CenteringError):
            critical_limit_sampler(f, CRIT, np.random.default_rng(1))

    def test_regime_error(self):
        with pytest.raises(RegimeError):
            critical_limit_sampler(kernel_xx(), SLOW, np.random.default_rng(1))


class TestFastSampler:
    def test_h_polynomial_identities(self):
        f1 = Kernel.from_slot_funcs([FUNC_X])
        assert h_polynomial_value(f1, np.array([1.7]), FAST) == pytest.approx(1.7)
        f2 = kernel_xx()
        assert h_polynomial_value(f2, np.array([-1.3]), FAST) == pytest.approx(1.69)

    def test_order_one_mean_matches_start_shift(self):
        # the martingale limit started from x differs by x times the
        # population limit, so the sample mean moves from 0 to x
        f = Kernel.from_slot_funcs([FUNC_X], symmetric=True)
        rng = np.random.default_rng(113)
        shifted = ModelParams(lam=1.0, p=0.75, mu=0.1, sigma=1.0, x0=(2.0,))
        draws0 = fast_limit_sampler(f, FAST, rng, size=400, t_approx=12.0)
        draws2 = fast_limit_sampler(f, shifted, rng, size=400, t_approx=12.0)
        m0, se0 = mean_se(draws0)
        m2, se2 = mean_se(draws2)
        assert abs(m0) <= 4 * se0
        assert abs(m2 - 2.0) <= 4 * se2

    def test_order_two_is_square(self):
        rng = np.random.default_rng(127)
        draws = fast_limit_sampler(kernel_xx(), FAST, rng, size=50, t_approx=6.0)
        assert np.all(draws >= 0.0)

    def test_conditioned_variant_runs(self):
        f = Kernel.from_slot_funcs([FUNC_X], symmetric=True)
        rng = np.random.default_rng(131)
        draws = fast_limit_sampler(f, FAST, rng, size=50, t_approx=6.0,
                                   condition_on_survival=True)
        assert draws.shape == (50,)

    def test_default_horizon(self):
        t = default_fast_horizon(FAST, Caps(max_particles=10_000_000))
        assert 0 < t <= 14.0 / 0.3 + 1e-9
        with pytest.raises(RegimeError):
            default_fast_horizon(SLOW)

    def test_black_box_rejected(self):
        f = Kernel.black_box(lambda args: args[0][:, 0], arity=1, dim=1)
        with pytest.raises(NonPolynomialError):
            fast_limit_sampler(f, FAST, np.random.default_rng(1), t_approx=4.0)

    def test_regime_error(self):
        with pytest.raises(RegimeError):
            fast_limit_sampler(kernel_xx(), SLOW, np.random.default_rng(1))
