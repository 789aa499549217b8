"""Payoff definitions: variance swap, swaption sides, tail modification."""

import numpy as np
import pytest

from staticrep import (
    CustomPayoff,
    DomainError,
    ModifiedPayoff,
    VarianceSwapPayoff,
    swaption,
    swaption_bounds,
    variance_swap,
)


class TestVarianceSwap:
    def test_zero_at_spot(self, base_swap):
        assert base_swap.value(100.0) == pytest.approx(0.0, abs=1e-15)

    def test_value_formula(self, base_swap):
        S = 120.0
        expected = (2.0 / 0.25) * (np.log(100.0 / S) + (S - 100.0) / 100.0)
        assert base_swap.value(S) == pytest.approx(expected, rel=1e-14)

    def test_convexity(self, base_swap):
        S = np.linspace(1.0, 500.0, 999)
        assert np.all(base_swap.second_derivative(S) > 0.0)

    def test_second_derivative_formula(self, base_swap):
        S = np.array([50.0, 100.0, 250.0])
        np.testing.assert_allclose(
            base_swap.second_derivative(S), 2.0 / (0.25 * S**2), rtol=1e-14
        )

    def test_derivatives_match_finite_differences(self, base_swap):
        rng = np.random.default_rng(4)
        S = rng.uniform(20.0, 300.0, size=100)
        h = 1e-3 * S
        second = (base_swap.value(S + h) - 2 * base_swap.value(S)
                  + base_swap.value(S - h)) / h**2
        np.testing.assert_allclose(
            second, base_swap.second_derivative(S), rtol=1e-4
        )

    def test_requires_positive_inputs(self):
        with pytest.raises(DomainError):
            VarianceSwapPayoff(S0=-5.0, T=0.25)
        with pytest.raises(DomainError):
            VarianceSwapPayoff(S0=100.0, T=0.0)


class TestSwaptionBounds:
    # Printed reference roots; the residual check below is the sharper
    # statement (the references carry ~1e-3 rounding in the last digit).
    REFERENCE = {
        0.25: (95.0840, 105.0827),
        0.5: (93.0956, 107.2377),
        1.0: (90.3315, 110.3351),
    }

    @pytest.mark.parametrize("T", [0.25, 0.5, 1.0])
    def test_reference_roots(self, T):
        lo, hi = swaption_bounds(100.0, T, 0.01)
        ref_lo, ref_hi = self.REFERENCE[T]
        assert lo == pytest.approx(ref_lo, abs=2e-3)
        assert hi == pytest.approx(ref_hi, abs=2e-3)

    @pytest.mark.parametrize("T", [0.25, 0.5, 1.0])
    @pytest.mark.parametrize("K", [0.001, 0.01, 0.05])
    def test_root_residuals(self, T, K):
        payoff = variance_swap(100.0, T)
        lo, hi = swaption_bounds(100.0, T, K, tol=1e-10)
        assert abs(K - payoff.value(lo)) < 1e-9
        assert abs(K - payoff.value(hi)) < 1e-9
        assert lo < 100.0 < hi

    def test_h_positive_at_spot(self):
        sw = swaption(100.0, 0.25, 0.01)
        assert sw.h(100.0) == pytest.approx(0.01)

    def test_rejects_bad_strike(self):
        with pytest.raises(DomainError):
            swaption_bounds(100.0, 0.25, -0.01)


class TestSwaptionPayoff:
    def test_put_values(self):
        sw = swaption(100.0, 0.25, 0.01)
        lo, hi = sw.bounds
        assert sw.value(100.0) == pytest.approx(0.01)
        assert sw.value(lo) == pytest.approx(0.0, abs=1e-9)
        assert sw.value(0.5 * lo) == 0.0
        assert sw.value(2.0 * hi) == 0.0

    def test_put_support_and_breakpoints(self):
        sw = swaption(100.0, 0.25, 0.01)
        assert sw.support == sw.bounds
        assert tuple(sw.breakpoints) == tuple(sw.bounds)

    def test_put_has_interior_maximum_at_spot(self):
        sw = swaption(100.0, 0.25, 0.01)
        lo, hi = sw.bounds
        S = np.linspace(lo, hi, 2001)
        values = sw.value(S)
        assert abs(S[np.argmax(values)] - 100.0) < (hi - lo) / 1000

    def test_call_side_complements_put(self):
        put = swaption(100.0, 0.25, 0.01, side="put")
        call = swaption(100.0, 0.25, 0.01, side="call")
        base = variance_swap(100.0, 0.25)
        S = np.linspace(50.0, 200.0, 501)
        np.testing.assert_allclose(
            call.value(S) - put.value(S), base.value(S) - 0.01, atol=1e-12
        )
        assert call.support is None

    def test_side_validated(self):
        with pytest.raises(DomainError):
            swaption(100.0, 0.25, 0.01, side="straddle")


class TestModifiedPayoff:
    """(S - floor)^+ times the base payoff, used by the moment builder."""

    def test_values(self, base_swap):
        tail = ModifiedPayoff(base=base_swap, strike_floor=90.0)
        assert tail.value(80.0) == 0.0
        assert tail.value(120.0) == pytest.approx(30.0 * base_swap.value(120.0))

    def test_floor_is_breakpoint(self, base_swap):
        tail = ModifiedPayoff(base=base_swap, strike_floor=90.0)
        assert 90.0 in set(tail.breakpoints)


class TestCustomPayoff:
    def test_linear_payoff_has_zero_curvature(self):
        payoff = CustomPayoff(value_fn=lambda S: 2.0 * S + 3.0)
        S = np.linspace(10.0, 200.0, 50)
        np.testing.assert_allclose(payoff.value(S), 2.0 * S + 3.0)
        np.testing.assert_allclose(payoff.second_derivative(S), 0.0, atol=1e-6)

    def test_finite_difference_fallback_on_smooth_function(self):
        payoff = CustomPayoff(value_fn=lambda S: S**3)
        assert payoff.second_derivative(10.0) == pytest.approx(60.0, rel=1e-5)
