"""Terminal-price models: lognormal and jump-at-default mixture."""

import math

import numpy as np
import pytest

from staticrep import (
    CounterpartyModel,
    DomainError,
    LognormalModel,
    UnsupportedConfigError,
    bs_call,
    bs_digital_call,
    bs_digital_put,
    bs_put,
    cp_call,
    cp_cdf,
    cp_density,
    cp_put,
)
from staticrep.quadrature import integrate, integrate_semi_infinite, quantile


class TestLognormalPricing:
    def test_call_reference_values(self, base_model):
        assert bs_call(base_model, 100.0) == pytest.approx(4.6150, abs=5e-5)
        assert bs_call(base_model, 130.0) == pytest.approx(0.0228, abs=5e-5)

    def test_deterministic_limit(self):
        model = LognormalModel(S0=100.0, r=0.05, sigma=1e-12, T=0.25)
        expected = 100.0 - 50.0 * math.exp(-0.05 * 0.25)
        assert bs_call(model, 50.0) == pytest.approx(expected, rel=1e-12)

    def test_put_via_parity(self, base_model):
        forward_term = 100.0 - 50.0 * math.exp(-0.0125)
        assert bs_call(base_model, 50.0) - bs_put(base_model, 50.0) == \
            pytest.approx(forward_term, abs=1e-10)

    def test_digitals_sum_to_discount_bond(self, base_model):
        for K in (60.0, 100.0, 140.0):
            total = bs_digital_call(base_model, K) + bs_digital_put(base_model, K)
            assert total == pytest.approx(math.exp(-0.0125), abs=1e-12)

    def test_call_decreasing_in_strike(self, base_model):
        K = np.linspace(40.0, 200.0, 81)
        prices = np.array([bs_call(base_model, k) for k in K])
        assert np.all(np.diff(prices) < 0.0)

    def test_prices_nonnegative(self, base_model):
        for K in (20.0, 100.0, 400.0):
            assert bs_call(base_model, K) >= 0.0
            assert bs_put(base_model, K) >= 0.0

    def test_rejects_nonpositive_strike(self, base_model):
        with pytest.raises(DomainError):
            bs_call(base_model, 0.0)
        with pytest.raises(DomainError):
            bs_put(base_model, -10.0)

    def test_parity_against_quadrature_mean(self, base_model):
        mean = integrate_semi_infinite(
            lambda S: S * base_model.density(S), 0.0, model=base_model
        )
        K = 87.0
        residual = bs_call(base_model, K) - bs_put(base_model, K) \
            - base_model.discount() * (mean - K)
        assert abs(residual) < 1e-8


class TestLognormalDistribution:
    def test_density_normalizes(self, base_model):
        lo, hi = quantile(base_model, 1e-14), quantile(base_model, 1.0 - 1e-14)
        mass = integrate(base_model.density, lo, hi)
        assert mass == pytest.approx(1.0, abs=1e-8)

    def test_cdf_matches_density(self, base_model):
        S = np.linspace(60.0, 160.0, 21)
        h = 1e-4
        fd = (base_model.cdf(S + h) - base_model.cdf(S - h)) / (2 * h)
        np.testing.assert_allclose(fd, base_model.density(S), rtol=1e-6)

    def test_cdf_monotone_with_limits(self, base_model):
        S = np.linspace(1.0, 500.0, 200)
        F = base_model.cdf(S)
        assert np.all(np.diff(F) >= 0.0)
        assert base_model.cdf(1e-8) == pytest.approx(0.0, abs=1e-12)
        assert base_model.cdf(1e6) == pytest.approx(1.0, abs=1e-12)

    def test_expected_terminal(self, base_model):
        assert base_model.expected_terminal() == pytest.approx(
            100.0 * math.exp(0.0125), rel=1e-14
        )


class TestLognormalSampler:
    def test_martingale_mean(self, base_model):
        draws = base_model.sample(seed=123, count=1_000_000)
        se = draws.std(ddof=1) / math.sqrt(draws.size)
        assert abs(draws.mean() - 100.0 * math.exp(0.0125)) < 3 * se

    def test_seed_determinism(self, base_model):
        a = base_model.sample(seed=99, count=1000)
        b = base_model.sample(seed=99, count=1000)
        np.testing.assert_array_equal(a, b)

    def test_antithetic_pairs_mirror_in_log_space(self, base_model):
        draws = base_model.sample(seed=5, count=1000, antithetic=True)
        logs = np.log(draws) - (math.log(100.0) + (0.05 - 0.02) * 0.25)
        np.testing.assert_allclose(logs[:500] + logs[500:], 0.0, atol=1e-10)

    def test_antithetic_needs_even_count(self, base_model):
        with pytest.raises(DomainError):
            base_model.sample(seed=5, count=7, antithetic=True)


class TestCounterpartyConstruction:
    def test_probabilities_must_sum_to_one(self):
        with pytest.raises(DomainError):
            CounterpartyModel(S0=100, r=0.05, sigma1=0.4, sigma2=0.2, lam=0.5,
                              jump_fractions=(0.5, 0.0), jump_probs=(0.6, 0.5),
                              T=1.0)

    def test_total_loss_fraction_rejected_explicitly(self):
        with pytest.raises(UnsupportedConfigError):
            CounterpartyModel(S0=100, r=0.05, sigma1=0.4, sigma2=0.2, lam=0.5,
                              jump_fractions=(1.0,), jump_probs=(1.0,), T=1.0)

    def test_fraction_above_one_rejected(self):
        with pytest.raises(DomainError):
            CounterpartyModel(S0=100, r=0.05, sigma1=0.4, sigma2=0.2, lam=0.5,
                              jump_fractions=(1.2,), jump_probs=(1.0,), T=1.0)

    def test_mean_loss(self, cp_model):
        assert cp_model.m == pytest.approx(0.3 * 0.5 + 0.2 * (-0.2), rel=1e-14)


class TestCounterpartyDistribution:
    def test_no_default_limit_is_lognormal(self):
        cp = CounterpartyModel(S0=100, r=0.05, sigma1=0.2, sigma2=0.2, lam=0.0,
                               jump_fractions=(0.5,), jump_probs=(1.0,), T=0.25)
        ln = LognormalModel(S0=100, r=0.05, sigma=0.2, T=0.25)
        S = np.linspace(60.0, 160.0, 21)
        for s in S:
            assert cp_cdf(cp, s) == pytest.approx(ln.cdf(s), abs=1e-12)
            assert cp_density(cp, s) == pytest.approx(ln.density(s), rel=1e-10)

    def test_cdf_normalization(self, cp_model):
        assert cp_cdf(cp_model, 1e7) == pytest.approx(1.0, abs=1e-8)
        assert cp_cdf(cp_model, 1e-7) == pytest.approx(0.0, abs=1e-8)

    def test_density_normalizes(self, cp_model):
        lo = quantile(cp_model, 1e-12)
        hi = quantile(cp_model, 1.0 - 1e-12)
        mass = integrate(lambda S: cp_model.density(S), lo, hi)
        assert mass == pytest.approx(1.0, abs=1e-6)

    def test_cdf_density_consistency(self, cp_model):
        S = np.linspace(30.0, 280.0, 50)
        h = 1e-4
        for s in S:
            fd = (cp_cdf(cp_model, s + h) - cp_cdf(cp_model, s - h)) / (2 * h)
            assert fd == pytest.approx(cp_density(cp_model, s), rel=1e-6)

    def test_cdf_matches_empirical_cdf(self, cp_model):
        draws = cp_model.sample(seed=31415, count=1_000_000)
        probs = np.linspace(0.05, 0.95, 20)
        points = np.quantile(draws, probs)
        n = draws.size
        for p_target, s in zip(probs, points):
            model_p = cp_cdf(cp_model, s)
            se = math.sqrt(model_p * (1.0 - model_p) / n)
            empirical = np.mean(draws <= s)
            assert abs(empirical - model_p) < 3 * se


class TestCounterpartyPricing:
    def test_collapses_to_black_scholes(self):
        cp = CounterpartyModel(S0=100, r=0.05, sigma1=0.2, sigma2=0.2, lam=0.5,
                               jump_fractions=(0.0,), jump_probs=(1.0,), T=0.25)
        ln = LognormalModel(S0=100, r=0.05, sigma=0.2, T=0.25)
        for K in (60.0, 100.0, 150.0):
            assert cp_call(cp, K) == pytest.approx(bs_call(ln, K), abs=1e-10)
            assert cp_put(cp, K) == pytest.approx(bs_put(ln, K), abs=1e-10)

    def test_parity_residual(self, cp_model):
        mean = integrate_semi_infinite(
            lambda S: S * cp_model.density(S), 0.0, model=cp_model
        )
        for K in (50.0, 100.0, 200.0):
            residual = cp_call(cp_model, K) - cp_put(cp_model, K) \
                - cp_model.discount() * (mean - K)
            assert abs(residual) < 1e-8

    def test_call_against_quadrature(self, cp_model):
        direct = cp_model.discount() * integrate_semi_infinite(
            lambda S: np.maximum(S - 100.0, 0.0) * cp_model.density(S),
            0.0, model=cp_model, points=[100.0],
        )
        assert cp_call(cp_model, 100.0) == pytest.approx(direct, abs=1e-5)

    def test_put_limits(self, cp_model):
        assert cp_put(cp_model, 1e-10) == pytest.approx(0.0, abs=1e-10)
        deep = cp_put(cp_model, 1000.0)
        expected = cp_model.discount() * (1000.0 - cp_model.expected_terminal())
        assert deep == pytest.approx(expected, abs=1e-4)

    def test_calls_decreasing_in_strike(self, cp_model):
        K = np.linspace(20.0, 300.0, 29)
        prices = np.array([cp_call(cp_model, k) for k in K])
        assert np.all(np.diff(prices) < 0.0)


class TestCounterpartySampler:
    def test_martingale_mean(self, cp_model):
        draws = cp_model.sample(seed=271828, count=1_000_000)
        se = draws.std(ddof=1) / math.sqrt(draws.size)
        assert abs(draws.mean() - 100.0 * math.exp(0.05)) < 3 * se

    def test_seed_determinism(self, cp_model):
        a = cp_model.sample(seed=7, count=2000)
        b = cp_model.sample(seed=7, count=2000)
        np.testing.assert_array_equal(a, b)

    def test_draws_positive(self, cp_model):
        draws = cp_model.sample(seed=1, count=10000)
        assert np.all(draws > 0.0)
