"""Fixed-strike quadratic hedging.

Given traded call strikes Xbar_1 < ... < Xbar_n, the weights minimizing the
density-weighted mean squared replication error solve the normal equations
Q w = u with

    q_ij = int_{max(Xbar_i, Xbar_j)}^inf (S - Xbar_i)(S - Xbar_j) g(S) dS,
    u_i  = int_{Xbar_i}^inf (S - Xbar_i) f(S) g(S) dS.

For the lognormal model Q has a closed form; for other models it is
assembled by quadrature against the model density.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.special import ndtr

from .equidist import EquidistConfig, solve as equidist_solve
from .errors import ConditioningError, ConditioningWarning, DomainError
from .models import LognormalModel
from .payoffs import ModifiedPayoff
from .quadrature import integrate_semi_infinite, quantile
from .spline import decompose
from .valuation import price_portfolio, raw_expectation

_COND_ERROR = 1e14
_COND_WARN = 1e12

# Interval count for the replication route to the moment vector; the value
# error decays like n^-2, so this keeps the route competitive with direct
# quadrature.
_U_REPLICATION_INTERVALS = 512


@dataclass(frozen=True)
class QuadHedgeProblem:
    """Fixed strikes, target payoff, pricing model, and notional scale."""

    fixed_strikes: np.ndarray
    payoff: object
    model: object
    notional: float = 1.0

    def __post_init__(self):
        strikes = np.array(self.fixed_strikes, dtype=float)
        if strikes.ndim != 1 or strikes.size < 1:
            raise DomainError("need at least one fixed strike")
        if np.any(strikes <= 0.0):
            raise DomainError("fixed strikes must be positive")
        if np.any(np.diff(strikes) < 0.0):
            raise DomainError("fixed strikes must be sorted ascending")
        strikes.setflags(write=False)
        object.__setattr__(self, "fixed_strikes", strikes)


@dataclass(frozen=True)
class QuadHedgeSolution:
    strikes: np.ndarray
    weights: np.ndarray
    per_option_price: np.ndarray
    per_option_cost: np.ndarray
    total_cost: float
    residual_error: float
    condition_estimate: float


def q_entry(model, strike_i, strike_j):
    """Closed-form lognormal cross moment q_ij.

    q_ij = S0^2 e^{(2r + sigma^2) T} Phi(d0) - (Xi + Xj) S0 e^{rT} Phi(d1)
           + Xi Xj Phi(d2), with d1, d2, d0 evaluated at max(Xi, Xj).
    """
    Ki = np.asarray(strike_i, dtype=float)
    Kj = np.asarray(strike_j, dtype=float)
    if np.any(Ki <= 0.0) or np.any(Kj <= 0.0):
        raise DomainError("strikes must be positive")
    top = np.maximum(Ki, Kj)
    sd = model.sigma * math.sqrt(model.T)
    d1 = (np.log(model.S0 / top) + (model.r + 0.5 * model.sigma ** 2) * model.T) / sd
    d2 = d1 - sd
    d0 = d1 + sd
    return (model.S0 ** 2 * math.exp((2.0 * model.r + model.sigma ** 2) * model.T) * ndtr(d0)
            - (Ki + Kj) * model.S0 * math.exp(model.r * model.T) * ndtr(d1)
            + Ki * Kj * ndtr(d2))


def q_entry_quadrature(model, strike_i, strike_j, spec=None):
    """q_ij by direct quadrature; the cross-check route and the only route
    for models without the lognormal closed form."""
    Ki, Kj = float(strike_i), float(strike_j)
    lo = max(Ki, Kj)

    def integrand(S):
        return (S - Ki) * (S - Kj) * model.density(S)

    return integrate_semi_infinite(integrand, lo, spec, model=model)


def q_matrix(problem, spec=None):
    strikes = problem.fixed_strikes
    if isinstance(problem.model, LognormalModel):
        return np.asarray(q_entry(problem.model, strikes[:, None], strikes[None, :]))
    n = strikes.size
    Q = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            Q[i, j] = Q[j, i] = q_entry_quadrature(problem.model, strikes[i], strikes[j], spec)
    return Q


def u_entry(problem, i, method="quadrature", spec=None, equi_config=None):
    """Moment u_i of the target payoff against the i-th call.

    ``quadrature`` integrates (S - Xbar_i) f(S) g(S) directly;
    ``replication`` treats (S - Xbar_i)^+ f(S) as a payoff in its own
    right, replicates it on [Xbar_i, far tail] with the full decomposition,
    and prices the portfolio.
    """
    strike = float(problem.fixed_strikes[i])
    payoff, model = problem.payoff, problem.model
    if method == "quadrature":
        def integrand(S):
            return (S - strike) * payoff.value(S) * model.density(S)

        pts = [p for p in payoff.breakpoints if p > strike]
        value = integrate_semi_infinite(integrand, strike, spec, model=model, points=pts)
    elif method == "replication":
        tail = ModifiedPayoff(base=payoff, strike_floor=strike)
        if equi_config is None:
            upper = quantile(model, 1.0 - 1e-12)
            equi_config = EquidistConfig(n=_U_REPLICATION_INTERVALS, X0=strike, Xn=upper)
        else:
            # The grid for the modified payoff always starts at the strike
            # itself; a passed config supplies the remaining knobs.
            if equi_config.Xn <= strike:
                raise DomainError(
                    f"replication upper bound {equi_config.Xn} must exceed strike {strike}"
                )
            equi_config = replace(equi_config, X0=strike)
        result = equidist_solve(tail, model, equi_config)
        portfolio = decompose(tail, result.grid, form="full")
        value = price_portfolio(portfolio, model) / model.discount()
    else:
        raise DomainError("u method must be 'quadrature' or 'replication'")
    return float(value) * problem.notional


def u_vector(problem, method="quadrature", spec=None, equi_config=None):
    return np.array([u_entry(problem, i, method, spec, equi_config)
                     for i in range(problem.fixed_strikes.size)])


def residual_variance(problem, weights, spec=None):
    """V(w) = E[(notional*f - sum_j w_j (S - Xbar_j)^+)^2] by direct quadrature."""
    strikes = problem.fixed_strikes
    weights = np.asarray(weights, dtype=float)

    def integrand(S):
        S = np.asarray(S, dtype=float)
        hedge = np.maximum(S[..., None] - strikes, 0.0) @ weights
        diff = problem.notional * problem.payoff.value(S) - hedge
        return diff * diff

    pts = list(strikes) + list(problem.payoff.breakpoints)
    return raw_expectation(integrand, problem.model, spec, points=pts)


def solve(problem, u_method="quadrature", spec=None, equi_config=None):
    """Assemble and solve the normal equations Q w = u.

    The system is symmetric positive definite for distinct strikes; the
    condition number is estimated first and duplicates are rejected.
    """
    Q = q_matrix(problem, spec)
    cond = float(np.linalg.cond(Q))
    if not math.isfinite(cond) or cond > _COND_ERROR:
        raise ConditioningError(
            f"the hedge system is numerically singular (condition estimate {cond:.3e}); "
            "check for duplicate or near-duplicate strikes",
            condition_estimate=cond,
        )
    if cond > _COND_WARN:
        warnings.warn(f"hedge system condition estimate {cond:.3e}", ConditioningWarning)
    u = u_vector(problem, u_method, spec, equi_config)
    try:
        factor = cho_factor(Q)
    except LinAlgError as exc:
        raise ConditioningError(
            f"the hedge system factorization failed: {exc}", condition_estimate=cond
        ) from None
    w = cho_solve(factor, u)

    prices = np.asarray(problem.model.call_price(problem.fixed_strikes), dtype=float)
    costs = w * prices
    payoff_sq = raw_expectation(
        lambda S: (problem.notional * problem.payoff.value(S)) ** 2,
        problem.model, spec, points=list(problem.payoff.breakpoints),
    )
    v = payoff_sq - 2.0 * float(w @ u) + float(w @ Q @ w)
    return QuadHedgeSolution(
        strikes=problem.fixed_strikes,
        weights=w,
        per_option_price=prices,
        per_option_cost=costs,
        total_cost=float(costs.sum()),
        residual_error=math.sqrt(max(v, 0.0)),
        condition_estimate=cond,
    )
