"""Optimal static replication of nonlinear payoffs with vanilla options.

The package approximates a twice-differentiable payoff by a linear spline
on a strike grid, places the strikes by equidistributing a curvature-based
monitor, and turns the spline into a portfolio of cash, puts, and calls.
It also solves the fixed-strike quadratic-hedging problem and prices under
a lognormal model and a jump-at-default counterparty model.
"""

from . import equidist, montecarlo, quadhedge, valuation
from .errors import (
    AccuracyError,
    ConditioningError,
    ConditioningWarning,
    ConfigError,
    ConvergenceWarning,
    DomainError,
    IterationError,
    NumericError,
    RangeError,
    StaticRepError,
    UnsupportedConfigError,
)
from .models import (
    CounterpartyModel,
    LognormalModel,
    bs_call,
    bs_digital_call,
    bs_digital_put,
    bs_put,
    cp_call,
    cp_cdf,
    cp_density,
    cp_put,
)
from .payoffs import (
    CustomPayoff,
    ModifiedPayoff,
    SwaptionPayoff,
    VarianceSwapPayoff,
    swaption,
    swaption_bounds,
    variance_swap,
)
from .quadrature import (
    QuadratureSpec,
    integrate,
    integrate_semi_infinite,
    quantile,
    truncation_bounds,
)
from .spline import (
    ErrorReport,
    ReplicatingPortfolio,
    StrikeGrid,
    decompose,
    error_bound,
    exact_error,
    g_kernel,
    interpolate,
)
from .equidist import EquidistConfig, EquidistResult, adaptation, iterate_once
from .montecarlo import McResult, McSpec, estimate
from .quadhedge import QuadHedgeProblem, QuadHedgeSolution, q_entry, u_entry
from .valuation import (
    ConvergenceReport,
    ValuationReport,
    convergence_study,
    price_portfolio,
    replicate,
    swaption_value,
    true_value,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "ConditioningError",
    "ConditioningWarning",
    "ConfigError",
    "ConvergenceReport",
    "ConvergenceWarning",
    "CounterpartyModel",
    "CustomPayoff",
    "DomainError",
    "EquidistConfig",
    "EquidistResult",
    "ErrorReport",
    "IterationError",
    "LognormalModel",
    "McResult",
    "McSpec",
    "ModifiedPayoff",
    "NumericError",
    "QuadHedgeProblem",
    "QuadHedgeSolution",
    "QuadratureSpec",
    "RangeError",
    "ReplicatingPortfolio",
    "StaticRepError",
    "StrikeGrid",
    "SwaptionPayoff",
    "UnsupportedConfigError",
    "ValuationReport",
    "VarianceSwapPayoff",
    "adaptation",
    "bs_call",
    "bs_digital_call",
    "bs_digital_put",
    "bs_put",
    "convergence_study",
    "cp_call",
    "cp_cdf",
    "cp_density",
    "cp_put",
    "decompose",
    "equidist",
    "error_bound",
    "estimate",
    "exact_error",
    "g_kernel",
    "integrate",
    "integrate_semi_infinite",
    "interpolate",
    "iterate_once",
    "montecarlo",
    "price_portfolio",
    "q_entry",
    "quadhedge",
    "quantile",
    "replicate",
    "swaption",
    "swaption_bounds",
    "swaption_value",
    "true_value",
    "truncation_bounds",
    "u_entry",
    "valuation",
    "variance_swap",
]
