"""Target payoffs: the claims being replicated, with the curvature data the
replication machinery needs.

Every payoff exposes a vectorized ``value`` and ``second_derivative``;
``first_derivative`` exists because the right-tail modified claim
``(S - K)^+ f(S)`` differentiates through a product rule. ``support`` marks
an interval outside which the payoff vanishes identically (the put-side
variance swaption), and ``breakpoints`` lists kinks so integrators can
split intervals there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, IterationError

PAYOFF_TYPES = ("variance_swap", "swaption_put", "swaption_call")


class Payoff:
    """Base payoff. Subclasses should be immutable and thread-safe."""

    support: Optional[tuple] = None
    breakpoints: tuple = ()

    def value(self, S):
        raise NotImplementedError

    def first_derivative(self, S):
        S = np.asarray(S, dtype=float)
        step = 1e-4 * np.maximum(S, 1.0)
        return (self.value(S + step) - self.value(S - step)) / (2.0 * step)

    def second_derivative(self, S):
        # Central difference with step 1e-4*max(S, 1) for payoffs that do
        # not carry an analytic curvature.
        S = np.asarray(S, dtype=float)
        step = 1e-4 * np.maximum(S, 1.0)
        up = self.value(S + step)
        mid = self.value(S)
        down = self.value(S - step)
        return (up - 2.0 * mid + down) / (step * step)


@dataclass(frozen=True)
class VarianceSwapPayoff(Payoff):
    """Log-contract exposure (2/T)((S - S0)/S0 - ln(S/S0)) per unit notional.

    Convex, zero at S0, with analytic curvature 2/(T S^2).
    """

    S0: float
    T: float

    def __post_init__(self):
        if not self.S0 > 0:
            raise DomainError("spot S0 must be positive")
        if not self.T > 0:
            raise DomainError("maturity T must be positive")

    def value(self, S):
        S = np.asarray(S, dtype=float)
        return (2.0 / self.T) * ((S - self.S0) / self.S0 - np.log(S / self.S0))

    def first_derivative(self, S):
        S = np.asarray(S, dtype=float)
        return (2.0 / self.T) * (1.0 / self.S0 - 1.0 / S)

    def second_derivative(self, S):
        S = np.asarray(S, dtype=float)
        return 2.0 / (self.T * S * S)


def variance_swap(S0, T):
    """Variance exposure for one volatility point squared per unit notional."""
    return VarianceSwapPayoff(S0=float(S0), T=float(T))


def swaption_bounds(S0, T, K, tol=1e-10, max_iter=100):
    """Roots (S_L, S_R) of h(S) = K - variance_payoff(S) by Newton's method.

    h is concave with its maximum K at S0, so Newton iterates started on
    either flank converge monotonically; the left start is
    max(1e-6, 0.1*S0), the right start 10*S0.
    """
    if not K > 0:
        raise DomainError("variance strike K must be positive")
    if not tol > 0:
        raise DomainError("root tolerance must be positive")
    base = variance_swap(S0, T)

    def h(s):
        return K - float(base.value(s))

    def hp(s):
        return -float(base.first_derivative(s))

    def newton(start):
        s = float(start)
        for _ in range(int(max_iter)):
            v = h(s)
            if abs(v) < tol:
                return s
            step = v / hp(s)
            nxt = s - step
            while nxt <= 0.0:
                step *= 0.5
                nxt = s - step
            s = nxt
        if abs(h(s)) < tol:
            return s
        raise IterationError(
            f"Newton iteration for the swaption bound from {start} did not "
            f"converge in {max_iter} steps (residual {h(s):.3e})"
        )

    left = newton(max(1e-6, 0.1 * S0))
    right = newton(10.0 * S0)
    return float(left), float(right)


@dataclass(frozen=True)
class SwaptionPayoff(Payoff):
    """Option on the variance exposure with variance strike K.

    The put side pays (K - f(S))^+ and is supported on [S_L, S_R]; the call
    side pays (f(S) - K)^+ on the complement. Curvature at the kinks uses a
    closed-interval convention on the put side, so grid endpoints placed at
    the bounds see the interior value.
    """

    S0: float
    T: float
    K: float
    side: str
    bounds: tuple

    def __post_init__(self):
        if self.side not in ("put", "call"):
            raise DomainError("swaption side must be 'put' or 'call'")

    @property
    def support(self):
        return self.bounds if self.side == "put" else None

    @property
    def breakpoints(self):
        return self.bounds

    def _base(self):
        return VarianceSwapPayoff(self.S0, self.T)

    def h(self, S):
        return self.K - self._base().value(S)

    def value(self, S):
        hv = self.h(np.asarray(S, dtype=float))
        if self.side == "put":
            return np.maximum(hv, 0.0)
        return np.maximum(-hv, 0.0)

    def first_derivative(self, S):
        S = np.asarray(S, dtype=float)
        lo, hi = self.bounds
        slope = self._base().first_derivative(S)
        if self.side == "put":
            return np.where((S >= lo) & (S <= hi), -slope, 0.0)
        return np.where((S < lo) | (S > hi), slope, 0.0)

    def second_derivative(self, S):
        S = np.asarray(S, dtype=float)
        lo, hi = self.bounds
        curv = self._base().second_derivative(S)
        if self.side == "put":
            return np.where((S >= lo) & (S <= hi), -curv, 0.0)
        return np.where((S < lo) | (S > hi), curv, 0.0)


def swaption(S0, T, K, side="put", tol=1e-10, max_iter=100):
    """Construct a variance swaption with Newton-computed support bounds."""
    bounds = swaption_bounds(S0, T, K, tol=tol, max_iter=max_iter)
    return SwaptionPayoff(S0=float(S0), T=float(T), K=float(K), side=side, bounds=bounds)


@dataclass(frozen=True)
class ModifiedPayoff(Payoff):
    """Right-tail claim (S - strike_floor)^+ * base(S).

    This is the integrand of the quadratic-hedge moment vector expressed as
    a payoff, so it can be replicated like any other claim. The curvature
    above the floor follows the product rule
    2 base'(S) + (S - floor) base''(S); evaluation at the floor itself takes
    the right limit.
    """

    base: Payoff
    strike_floor: float

    def __post_init__(self):
        if not self.strike_floor > 0:
            raise DomainError("strike_floor must be positive")

    @property
    def breakpoints(self):
        extra = tuple(p for p in self.base.breakpoints if p > self.strike_floor)
        return (self.strike_floor,) + extra

    @property
    def support(self):
        if self.base.support is None:
            return None
        lo, hi = self.base.support
        return (max(lo, self.strike_floor), hi)

    def value(self, S):
        S = np.asarray(S, dtype=float)
        return np.maximum(S - self.strike_floor, 0.0) * self.base.value(S)

    def first_derivative(self, S):
        S = np.asarray(S, dtype=float)
        inside = S >= self.strike_floor
        v = self.base.value(S) + (S - self.strike_floor) * self.base.first_derivative(S)
        return np.where(inside, v, 0.0)

    def second_derivative(self, S):
        S = np.asarray(S, dtype=float)
        inside = S >= self.strike_floor
        v = 2.0 * self.base.first_derivative(S) \
            + (S - self.strike_floor) * self.base.second_derivative(S)
        return np.where(inside, v, 0.0)


@dataclass(frozen=True)
class CustomPayoff(Payoff):
    """Wrap user-supplied callables as a payoff.

    ``value_fn`` must accept numpy arrays. Derivatives fall back to central
    finite differences when not provided.
    """

    value_fn: Callable
    second_derivative_fn: Optional[Callable] = None
    first_derivative_fn: Optional[Callable] = None
    support_interval: Optional[tuple] = None
    kinks: tuple = ()

    @property
    def support(self):
        return self.support_interval

    @property
    def breakpoints(self):
        return tuple(self.kinks)

    def value(self, S):
        return np.asarray(self.value_fn(np.asarray(S, dtype=float)), dtype=float)

    def first_derivative(self, S):
        if self.first_derivative_fn is None:
            return super().first_derivative(S)
        return np.asarray(self.first_derivative_fn(np.asarray(S, dtype=float)), dtype=float)

    def second_derivative(self, S):
        if self.second_derivative_fn is None:
            return super().second_derivative(S)
        return np.asarray(self.second_derivative_fn(np.asarray(S, dtype=float)), dtype=float)
