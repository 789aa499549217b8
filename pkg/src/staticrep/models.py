"""Risk-neutral terminal-price models.

``LognormalModel`` is plain Black-Scholes. ``CounterpartyModel`` follows a
first lognormal regime until an exponential default time tau, jumps by a
factor (1 - gamma) drawn from a finite atom list, then follows a second
lognormal regime to maturity; the pre-default drift carries the
compensator lambda*m so the discounted price stays a martingale.

Both models expose vectorized density/cdf/option prices and an exact
terminal sampler (no time discretization).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .errors import DomainError, UnsupportedConfigError
from .quadrature import gl_nodes

_SQRT_2PI = math.sqrt(2.0 * math.pi)

# Order of the fixed Gauss-Legendre rule used for the default-time
# integrals. The integrands are analytic in t, so this is accurate to
# machine precision; tests cross-check it against adaptive quadrature.
_TIME_GL_ORDER = 96


def _norm_pdf(z):
    return np.exp(-0.5 * z * z) / _SQRT_2PI


class AssetModel:
    """Pricing interface shared by the concrete models.

    Instances are immutable; evaluation methods are pure and thread-safe.
    Samplers take their stream from the seed argument, so one stream per
    worker is the caller's responsibility.
    """

    S0: float
    r: float
    T: float

    def discount(self):
        return math.exp(-self.r * self.T)

    def density(self, S):
        raise NotImplementedError

    def cdf(self, S):
        raise NotImplementedError

    def call_price(self, K):
        raise NotImplementedError

    def put_price(self, K):
        raise NotImplementedError

    def sample(self, seed, count, antithetic=False):
        raise NotImplementedError


def _check_strikes(K):
    if np.any(np.asarray(K, dtype=float) <= 0.0):
        raise DomainError("option strikes must be positive")


def _rng(seed):
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def _antithetic_count(count, antithetic):
    count = int(count)
    if count < 1:
        raise DomainError("sample count must be at least 1")
    if antithetic and count % 2:
        raise DomainError("antithetic sampling needs an even path count")
    return count


@dataclass(frozen=True)
class LognormalModel(AssetModel):
    """Geometric Brownian motion at maturity: ln S_T ~ N(ln S0 + (r - s^2/2)T, s^2 T)."""

    S0: float
    r: float
    sigma: float
    T: float

    def __post_init__(self):
        if not self.S0 > 0:
            raise DomainError("spot S0 must be positive")
        if not self.sigma > 0:
            raise DomainError("volatility sigma must be positive")
        if not self.T > 0:
            raise DomainError("maturity T must be positive")

    @property
    def _log_mean(self):
        return math.log(self.S0) + (self.r - 0.5 * self.sigma ** 2) * self.T

    @property
    def _log_sd(self):
        return self.sigma * math.sqrt(self.T)

    def density(self, S):
        S = np.asarray(S, dtype=float)
        pos = S > 0.0
        z = np.where(pos, (np.log(np.where(pos, S, 1.0)) - self._log_mean) / self._log_sd, 0.0)
        out = np.where(pos, _norm_pdf(z) / (np.where(pos, S, 1.0) * self._log_sd), 0.0)
        return out

    def cdf(self, S):
        S = np.asarray(S, dtype=float)
        pos = S > 0.0
        z = np.where(pos, (np.log(np.where(pos, S, 1.0)) - self._log_mean) / self._log_sd, 0.0)
        return np.where(pos, ndtr(z), 0.0)

    def _d12(self, K):
        K = np.asarray(K, dtype=float)
        sd = self._log_sd
        d1 = (np.log(self.S0 / K) + (self.r + 0.5 * self.sigma ** 2) * self.T) / sd
        return d1, d1 - sd

    def call_price(self, K):
        _check_strikes(K)
        d1, d2 = self._d12(K)
        return self.S0 * ndtr(d1) - np.asarray(K, dtype=float) * self.discount() * ndtr(d2)

    def put_price(self, K):
        _check_strikes(K)
        d1, d2 = self._d12(K)
        return np.asarray(K, dtype=float) * self.discount() * ndtr(-d2) - self.S0 * ndtr(-d1)

    def digital_call_price(self, K):
        """Pays 1 on {S_T > K}."""
        _check_strikes(K)
        _, d2 = self._d12(K)
        return self.discount() * ndtr(d2)

    def digital_put_price(self, K):
        """Pays 1 on {S_T < K}."""
        _check_strikes(K)
        _, d2 = self._d12(K)
        return self.discount() * ndtr(-d2)

    def expected_terminal(self):
        return self.S0 * math.exp(self.r * self.T)

    def sample(self, seed, count, antithetic=False):
        count = _antithetic_count(count, antithetic)
        rng = _rng(seed)
        if antithetic:
            half = count // 2
            z = rng.standard_normal(half)
            z = np.concatenate([z, -z])
        else:
            z = rng.standard_normal(count)
        return np.exp(self._log_mean + self._log_sd * z)


def bs_call(model, K):
    """Black-Scholes call price."""
    return model.call_price(K)


def bs_put(model, K):
    """Black-Scholes put price."""
    return model.put_price(K)


def bs_digital_call(model, K):
    """Cash-or-nothing call paying 1 on {S_T > K}."""
    return model.digital_call_price(K)


def bs_digital_put(model, K):
    """Cash-or-nothing put paying 1 on {S_T < K}."""
    return model.digital_put_price(K)


@dataclass(frozen=True)
class CounterpartyModel(AssetModel):
    """Jump-at-default regime-switch model.

    Before the exponential default time the log-price drifts at
    r + lambda*m - sigma1^2/2 (m the mean jump loss), at default the price
    is multiplied by (1 - gamma) with gamma drawn from ``jump_fractions``
    by ``jump_probs``, afterwards it diffuses at volatility sigma2 and
    drift r. gamma = 1 would put an atom at S = 0 and is rejected.
    """

    S0: float
    r: float
    sigma1: float
    sigma2: float
    lam: float
    jump_fractions: tuple
    jump_probs: tuple
    T: float

    def __post_init__(self):
        if not self.S0 > 0:
            raise DomainError("spot S0 must be positive")
        if not (self.sigma1 > 0 and self.sigma2 > 0):
            raise DomainError("both regime volatilities must be positive")
        if self.lam < 0:
            raise DomainError("default intensity lambda must be nonnegative")
        if not self.T > 0:
            raise DomainError("maturity T must be positive")
        gam = tuple(float(g) for g in self.jump_fractions)
        pr = tuple(float(p) for p in self.jump_probs)
        if len(gam) != len(pr) or not gam:
            raise DomainError("jump_fractions and jump_probs must be nonempty and equal-length")
        if any(p < 0 for p in pr) or abs(sum(pr) - 1.0) > 1e-12:
            raise DomainError("jump_probs must be nonnegative and sum to 1")
        if any(g > 1 for g in gam):
            raise DomainError("jump fractions cannot exceed 1")
        if any(g == 1.0 for g in gam):
            raise UnsupportedConfigError(
                "jump fraction 1 puts a point mass at S = 0, which the density-based "
                "machinery cannot represent"
            )
        object.__setattr__(self, "jump_fractions", gam)
        object.__setattr__(self, "jump_probs", pr)

    @property
    def m(self):
        """Mean jump loss sum(p_i * gamma_i)."""
        return float(np.dot(self.jump_probs, self.jump_fractions))

    def a(self, t):
        t = np.asarray(t, dtype=float)
        return (self.r + self.lam * self.m - 0.5 * self.sigma1 ** 2) * t \
            + (self.r - 0.5 * self.sigma2 ** 2) * (self.T - t)

    def b(self, t):
        t = np.asarray(t, dtype=float)
        return np.sqrt(self.sigma1 ** 2 * t + self.sigma2 ** 2 * (self.T - t))

    def _time_nodes(self):
        x, w = gl_nodes(_TIME_GL_ORDER)
        return x * self.T, w * self.T

    def cdf(self, S):
        S = np.asarray(S, dtype=float)
        pos = S > 0.0
        x = np.log(np.where(pos, S, 1.0) / self.S0)
        aT, bT = float(self.a(self.T)), float(self.b(self.T))
        out = math.exp(-self.lam * self.T) * ndtr((x - aT) / bT)
        if self.lam > 0.0:
            t, w = self._time_nodes()
            at, bt = self.a(t), self.b(t)
            log1mg = np.log1p(-np.asarray(self.jump_fractions))
            # shape (..., atoms, time)
            z = (x[..., None, None] - log1mg[:, None] - at) / bt
            kernel = (w * self.lam * np.exp(-self.lam * t)) * ndtr(z)
            out = out + np.tensordot(kernel.sum(axis=-1), np.asarray(self.jump_probs),
                                     axes=([-1], [0]))
        return np.where(pos, out, 0.0)

    def density(self, S):
        S = np.asarray(S, dtype=float)
        pos = S > 0.0
        Ssafe = np.where(pos, S, 1.0)
        x = np.log(Ssafe / self.S0)
        aT, bT = float(self.a(self.T)), float(self.b(self.T))
        out = math.exp(-self.lam * self.T) * _norm_pdf((x - aT) / bT) / (Ssafe * bT)
        if self.lam > 0.0:
            t, w = self._time_nodes()
            at, bt = self.a(t), self.b(t)
            log1mg = np.log1p(-np.asarray(self.jump_fractions))
            z = (x[..., None, None] - log1mg[:, None] - at) / bt
            kernel = (w * self.lam * np.exp(-self.lam * t)) * _norm_pdf(z) / bt
            mix = np.tensordot(kernel.sum(axis=-1), np.asarray(self.jump_probs),
                               axes=([-1], [0]))
            out = out + mix / Ssafe
        return np.where(pos, out, 0.0)

    def call_price(self, K):
        _check_strikes(K)
        K = np.asarray(K, dtype=float)
        aT, bT = float(self.a(self.T)), float(self.b(self.T))
        d0 = (aT - np.log(K / self.S0)) / bT
        out = self.S0 * math.exp(-(1.0 - self.m) * self.lam * self.T) * ndtr(d0 + bT) \
            - K * math.exp(-(self.r + self.lam) * self.T) * ndtr(d0)
        if self.lam > 0.0:
            t, w = self._time_nodes()
            at, bt = self.a(t), self.b(t)
            gam = np.asarray(self.jump_fractions)
            log1mg = np.log1p(-gam)
            # d_i(t) has shape (..., atoms, time)
            d = (at + log1mg[:, None] + np.log(self.S0 / K)[..., None, None]) / bt
            growth = np.exp(at + 0.5 * bt * bt)
            inner = self.S0 * (1.0 - gam)[:, None] * growth * ndtr(d + bt) \
                - K[..., None, None] * ndtr(d)
            kernel = (w * self.lam * np.exp(-self.lam * t)) * inner
            mix = np.tensordot(kernel.sum(axis=-1), np.asarray(self.jump_probs),
                               axes=([-1], [0]))
            out = out + self.discount() * mix
        return out

    def put_price(self, K):
        """Put price via the parity relation for this model.

        put = call + K e^{-rT} - S0 e^{-(1-m) lam T}
              - lam S0 e^{-rT} (int_0^T e^{a + b^2/2 - lam t} dt) sum p_i (1 - gamma_i)
        """
        _check_strikes(K)
        K = np.asarray(K, dtype=float)
        call = self.call_price(K)
        t, w = self._time_nodes()
        integral = float(np.sum(w * np.exp(self.a(t) + 0.5 * self.b(t) ** 2 - self.lam * t)))
        mean_keep = float(np.dot(self.jump_probs, 1.0 - np.asarray(self.jump_fractions)))
        return call + K * self.discount() \
            - self.S0 * math.exp(-(1.0 - self.m) * self.lam * self.T) \
            - self.lam * self.S0 * self.discount() * integral * mean_keep

    def expected_terminal(self):
        # The compensated jump keeps the discounted price a martingale.
        return self.S0 * math.exp(self.r * self.T)

    def sample(self, seed, count, antithetic=False):
        count = _antithetic_count(count, antithetic)
        rng = _rng(seed)
        half = count // 2 if antithetic else count
        if self.lam > 0.0:
            tau = rng.exponential(scale=1.0 / self.lam, size=half)
            jumps = rng.choice(len(self.jump_fractions), size=half,
                               p=np.asarray(self.jump_probs))
        else:
            tau = np.full(half, np.inf)
            jumps = np.zeros(half, dtype=int)
        z = rng.standard_normal(half)
        if antithetic:
            tau = np.concatenate([tau, tau])
            jumps = np.concatenate([jumps, jumps])
            z = np.concatenate([z, -z])
        defaulted = tau < self.T
        t_eff = np.minimum(tau, self.T)
        log1mg = np.log1p(-np.asarray(self.jump_fractions))
        ln_ratio = self.a(t_eff) + self.b(t_eff) * z \
            + np.where(defaulted, log1mg[jumps], 0.0)
        return self.S0 * np.exp(ln_ratio)


def cp_cdf(model, S):
    """Terminal-price distribution function of the counterparty model."""
    return model.cdf(S)


def cp_density(model, S):
    """Terminal-price density of the counterparty model."""
    return model.density(S)


def cp_call(model, K):
    """Call price at time 0 under counterparty risk."""
    return model.call_price(K)


def cp_put(model, K):
    """Put price at time 0 under counterparty risk, by parity."""
    return model.put_price(K)


def sample(model, seed, count, antithetic=False):
    """Draw terminal prices from the model; deterministic given the seed."""
    return model.sample(seed, count, antithetic=antithetic)
