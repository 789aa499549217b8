"""Strike selection by equidistribution.

Each interval carries a monitor value h_i * rho_i built from the
density-weighted squared curvature of the payoff; the fixed-point
iteration repositions interior strikes so every interval carries an equal
share. The monitor exponent gamma defaults to 2/5, the value minimizing
the curvature error bound.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConvergenceWarning, DomainError, NumericError
from .quadrature import gl_nodes
from .spline import StrikeGrid, _curvature_integrals_fixed, default_split_index

log = logging.getLogger(__name__)

# Gauss-Legendre order for the kernel integral inside the rectangle-rule
# monitor; the integrand is a polynomial times the density, so low order
# suffices.
_KERNEL_GL_ORDER = 16

# Panel count for the quadrature-rule monitor.
_MONITOR_PANELS = 128


@dataclass(frozen=True)
class EquidistConfig:
    """Iteration controls for strike selection on [X0, Xn] with n intervals."""

    n: int
    X0: float
    Xn: float
    gamma_exponent: float = 0.4
    max_iterations: int = 100
    move_tol: float = 1e-8
    rho_rule: str = "rectangle"
    keep_history: bool = False

    def __post_init__(self):
        if not 0.0 < self.gamma_exponent <= 2.0:
            raise DomainError("gamma_exponent must lie in (0, 2]")
        if not 0.0 < self.X0 < self.Xn:
            raise DomainError("need 0 < X0 < Xn")
        if self.n < 2:
            raise DomainError("need at least two intervals")
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be at least 1")
        if not self.move_tol > 0:
            raise DomainError("move_tol must be positive")
        if self.rho_rule not in ("rectangle", "quadrature"):
            raise DomainError("rho_rule must be 'rectangle' or 'quadrature'")


@dataclass
class EquidistResult:
    """Converged grid plus iteration diagnostics.

    ``residual`` is the equidistribution imbalance
    max_i |h_i rho_i * n / sum_j h_j rho_j - 1| on the final grid;
    ``hrho_sums`` records sum_j h_j rho_j for every iteration (the monitor
    mass, bounded by 2 (Xn - X0)).
    """

    grid: StrikeGrid
    iterations_used: int
    residual: float
    converged: bool
    hrho_sums: list
    history: Optional[list] = None
    warning: Optional[str] = None


def _interval_integrals(X, payoff, model, config):
    """Per-interval values I_i = int_{X_i}^{X_{i+1}} G(S) f''(S)^2 dS."""
    X = np.asarray(X, dtype=float)
    h = np.diff(X)
    if config.rho_rule == "rectangle":
        xi, w = gl_nodes(_KERNEL_GL_ORDER)
        S = X[:-1, None] + h[:, None] * xi[None, :]
        ghat1 = (np.asarray(model.density(S), dtype=float)
                 * (xi ** 2 * (1.0 - xi) ** 3 / 3.0)[None, :]) @ w
        fpp = np.asarray(payoff.second_derivative(X[1:]), dtype=float)
        return h * ghat1 * fpp * fpp
    return _curvature_integrals_fixed(X, payoff, model, _MONITOR_PANELS)


def _rho_from_integrals(I, h, span, gamma):
    if not np.all(np.isfinite(I)):
        raise NumericError("monitor integrals are not finite")
    if np.all(I == 0.0):
        # Degenerate payoff (f'' identically zero): fall back to a uniform
        # monitor rather than dividing by a zero intensity.
        log.info("zero-curvature payoff: adaptation function is uniform")
        return np.ones_like(h)
    half = gamma / 2.0
    alpha = (float((h * (I / h) ** half).sum()) / span) ** (1.0 / half)
    return (1.0 + I / (alpha * h)) ** half


def adaptation(grid, payoff, model, config):
    """Adaptation function rho_i on the grid's intervals."""
    X = grid.strikes if isinstance(grid, StrikeGrid) else np.asarray(grid, dtype=float)
    I = _interval_integrals(X, payoff, model, config)
    return _rho_from_integrals(I, np.diff(X), X[-1] - X[0], config.gamma_exponent)


def _push_strikes(X, rho):
    """One fixed-point update: invert the cumulative monitor at equal shares."""
    h = np.diff(X)
    cum = np.concatenate([[0.0], np.cumsum(h * rho)])
    targets = np.linspace(0.0, cum[-1], X.size)[1:-1]
    interior = np.interp(targets, cum, X)
    return np.concatenate([[X[0]], interior, [X[-1]]])


def iterate_once(grid, payoff, model, config):
    """Apply one strike-repositioning step and return the new grid."""
    X = grid.strikes if isinstance(grid, StrikeGrid) else np.asarray(grid, dtype=float)
    rho = adaptation(X, payoff, model, config)
    Xnew = _push_strikes(X, rho)
    split = grid.split_index if isinstance(grid, StrikeGrid) else default_split_index(Xnew, model)
    return StrikeGrid(Xnew, min(split, Xnew.size - 1))


def solve(payoff, model, config):
    """Iterate from the uniform grid until the strikes stop moving.

    Stops when the largest strike movement relative to the grid span falls
    below ``move_tol`` or the iteration budget runs out; the latter attaches
    a convergence warning when the equidistribution residual is still loose.
    """
    X = np.linspace(config.X0, config.Xn, config.n + 1)
    span = config.Xn - config.X0
    history = [X.copy()] if config.keep_history else None
    hrho_sums = []
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iterations + 1):
        rho = adaptation(X, payoff, model, config)
        hrho_sums.append(float((np.diff(X) * rho).sum()))
        Xnew = _push_strikes(X, rho)
        move = float(np.max(np.abs(Xnew - X))) / span
        X = Xnew
        if history is not None:
            history.append(X.copy())
        if move < config.move_tol:
            converged = True
            break

    rho = adaptation(X, payoff, model, config)
    monitor = np.diff(X) * rho
    residual = float(np.max(np.abs(monitor * config.n / monitor.sum() - 1.0)))
    warning = None
    if not converged and residual > 10.0 * config.move_tol:
        warning = (f"strike iteration used all {config.max_iterations} iterations; "
                   f"equidistribution residual {residual:.3e}")
        warnings.warn(warning, ConvergenceWarning)
    grid = StrikeGrid(X, default_split_index(X, model))
    return EquidistResult(grid=grid, iterations_used=iterations, residual=residual,
                          converged=converged, hrho_sums=hrho_sums, history=history,
                          warning=warning)
