"""One-dimensional numerical integration used by every other module.

Three rules are exposed through :class:`QuadratureSpec`:

* ``adaptive`` delegates to QUADPACK (``scipy.integrate.quad``) and is the
  accuracy backbone for reproducing four-significant-figure table values;
* ``composite-simpson`` and ``rectangle`` are fixed-grid rules kept as
  independent cross-checks (and they evaluate the integrand on arrays, so
  they are the fast path for vectorized integrands).

Semi-infinite integrals are truncated where the model's survival
probability drops below a tolerance, found by bisection on the model CDF,
so fat-tailed models are handled the same way as the lognormal.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate as _sp_integrate

from .errors import AccuracyError, DomainError

_RULES = ("adaptive", "composite-simpson", "rectangle")

# QUADPACK subdivisions are much coarser-grained than Simpson halvings;
# anything beyond this cap only wastes workspace memory.
_QUADPACK_LIMIT_CAP = 1000


@dataclass(frozen=True)
class QuadratureSpec:
    """Integration rule selection and accuracy budget.

    ``max_subdivisions`` caps the adaptive rule's subinterval count and is
    the panel count for the fixed-grid rules.
    """

    rule: str = "adaptive"
    abs_tol: float = 1e-10
    max_subdivisions: int = 2 ** 20

    def __post_init__(self):
        if self.rule not in _RULES:
            raise DomainError(f"unknown quadrature rule {self.rule!r}; expected one of {_RULES}")
        if not self.abs_tol > 0:
            raise DomainError("abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be at least 1")


DEFAULT_SPEC = QuadratureSpec()


def _eval_vectorized(f, x):
    """Evaluate f on an array, falling back to a scalar loop."""
    x = np.asarray(x, dtype=float)
    try:
        y = np.asarray(f(x), dtype=float)
    except (TypeError, ValueError):
        y = None
    if y is not None and y.shape == x.shape:
        return y
    return np.array([float(f(xi)) for xi in x])


def _interior_points(points, a, b):
    if points is None:
        return None
    pts = sorted({float(p) for p in points if a < p < b})
    return pts or None


def _split_segments(a, b, points):
    pts = _interior_points(points, a, b)
    if not pts:
        return [(a, b)]
    knots = [a, *pts, b]
    return list(zip(knots[:-1], knots[1:]))


def _adaptive(f, a, b, spec, points):
    limit = int(min(spec.max_subdivisions, _QUADPACK_LIMIT_CAP))
    out = _sp_integrate.quad(
        f,
        a,
        b,
        epsabs=spec.abs_tol,
        epsrel=1e-10,
        limit=max(limit, 1),
        points=_interior_points(points, a, b),
        full_output=True,
    )
    value, abserr = out[0], out[1]
    if len(out) > 3 and abserr > spec.abs_tol:
        raise AccuracyError(
            f"adaptive quadrature on [{a}, {b}] stopped with error estimate "
            f"{abserr:.3e} > {spec.abs_tol:.3e}: {out[3]}",
            best_estimate=value,
            error_estimate=abserr,
        )
    return value


def _simpson_panel(f, a, b, panels):
    n = max(2, panels + (panels % 2))
    x = np.linspace(a, b, n + 1)
    y = _eval_vectorized(f, x)
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return (b - a) / (3.0 * n) * float(w @ y)


def _midpoint_panel(f, a, b, panels):
    n = max(1, panels)
    h = (b - a) / n
    x = a + h * (np.arange(n) + 0.5)
    return h * float(_eval_vectorized(f, x).sum())


def _fixed_rule(f, a, b, spec, points, panel_fn):
    total = 0.0
    width = b - a
    for lo, hi in _split_segments(a, b, points):
        share = max(2, int(round(spec.max_subdivisions * (hi - lo) / width)))
        total += panel_fn(f, lo, hi, share)
    return total


def integrate(f, a, b, spec=None, points=None):
    """Approximate the integral of ``f`` over the finite interval [a, b].

    ``points`` lists interior locations where the integrand loses
    smoothness (payoff kinks); the interval is split there.
    """
    spec = spec or DEFAULT_SPEC
    a, b = float(a), float(b)
    if a > b:
        raise DomainError(f"integration bounds out of order: {a} > {b}")
    if a == b:
        return 0.0
    if spec.rule == "adaptive":
        return _adaptive(f, a, b, spec, points)
    if spec.rule == "composite-simpson":
        return _fixed_rule(f, a, b, spec, points, _simpson_panel)
    return _fixed_rule(f, a, b, spec, points, _midpoint_panel)


def quantile(model, p, tol=1e-8):
    """Invert the model CDF by bracketing and bisection.

    Accuracy is relative in the price argument; tail truncation points do
    not need many digits.
    """
    if not 0.0 < p < 1.0:
        raise DomainError("quantile probability must lie in (0, 1)")
    scale = getattr(model, "S0", 1.0)
    lo, hi = scale * 1e-12, scale
    for _ in range(400):
        if model.cdf(hi) >= p:
            break
        hi *= 2.0
    else:
        raise AccuracyError("quantile bracketing failed on the upper side")
    for _ in range(400):
        if model.cdf(lo) <= p:
            break
        lo *= 0.5
    else:
        raise AccuracyError("quantile bracketing failed on the lower side")
    while hi - lo > tol * max(hi, 1.0):
        mid = 0.5 * (lo + hi)
        if model.cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def truncation_bounds(model, survival_tol=1e-12):
    """Interval outside which the model's probability mass is below tolerance."""
    return quantile(model, survival_tol), quantile(model, 1.0 - survival_tol)


def integrate_semi_infinite(f, a, spec=None, *, model=None, model_scale=None,
                            survival_tol=1e-12, points=None):
    """Integrate ``f`` over [a, infinity) against a decaying model tail.

    The upper limit is the point where the model's survival probability
    falls below ``survival_tol``; without a model, a generous multiple of
    ``model_scale`` is used instead.
    """
    if model is None and model_scale is None:
        raise DomainError("integrate_semi_infinite needs a model or a model_scale")
    if model is not None:
        upper = quantile(model, 1.0 - survival_tol)
        hints = [getattr(model, "S0", model_scale)]
    else:
        upper = 200.0 * float(model_scale)
        hints = [model_scale, 2.0 * model_scale]
    if upper <= a:
        return 0.0
    pts = list(points) if points else []
    pts.extend(h for h in hints if h is not None)
    return integrate(f, a, upper, spec, points=pts)


@lru_cache(maxsize=None)
def gl_nodes(order):
    """Gauss-Legendre nodes and weights mapped onto [0, 1]. Do not mutate."""
    x, w = np.polynomial.legendre.leggauss(order)
    return (x + 1.0) / 2.0, w / 2.0
