"""Monte-Carlo estimation of discounted payoff expectations.

Used as an independent oracle for the quadrature values and for the
swaption comparison column. Paths are drawn in fixed-size batches with
substreams spawned from the seed, and batch statistics are reduced in
batch order, so estimates are bit-identical for a given seed regardless
of the worker count (capped by STATIC_REPL_THREADS).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError

_BATCH = 1 << 20

THREADS_ENV_VAR = "STATIC_REPL_THREADS"


def _worker_count():
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None:
        return 1
    try:
        workers = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV_VAR} must be an integer, got {raw!r}") from None
    if workers < 1:
        raise ConfigError(f"{THREADS_ENV_VAR} must be at least 1")
    return workers


@dataclass(frozen=True)
class McSpec:
    """Path count, seed, and the antithetic-pairing flag."""

    paths: int
    seed: int
    antithetic: bool = False

    def __post_init__(self):
        if self.paths < 1:
            raise DomainError("paths must be at least 1")
        if self.antithetic and self.paths % 2:
            raise DomainError("antithetic sampling needs an even path count")


@dataclass(frozen=True)
class McResult:
    mean: float
    std_error: float
    paths: int


def _batch_stats(payoff, model, child_seed, count, antithetic):
    S = model.sample(child_seed, count, antithetic=antithetic)
    y = np.asarray(payoff.value(S), dtype=float)
    if antithetic:
        half = count // 2
        y = 0.5 * (y[:half] + y[half:])
    return float(y.sum()), float(y @ y), y.size


def estimate(payoff, model, spec, notional=100.0):
    """Discounted expectation e^{-rT} E[f(S_T)] * notional with its standard error.

    Antithetic pairing averages mirrored-Gaussian path pairs and computes
    the error from the pair means.
    """
    counts = []
    remaining = spec.paths
    while remaining > 0:
        take = min(_BATCH, remaining)
        counts.append(take)
        remaining -= take
    children = np.random.SeedSequence(spec.seed).spawn(len(counts))

    workers = _worker_count()
    if workers == 1:
        stats = [_batch_stats(payoff, model, c, n, spec.antithetic)
                 for c, n in zip(children, counts)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            stats = list(pool.map(
                lambda args: _batch_stats(payoff, model, *args, spec.antithetic),
                zip(children, counts),
            ))

    # Reduce in batch order for reproducibility.
    total = 0.0
    total_sq = 0.0
    n_samples = 0
    for s, sq, n in stats:
        total += s
        total_sq += sq
        n_samples += n
    mean_y = total / n_samples
    if n_samples > 1:
        var = max(total_sq - n_samples * mean_y * mean_y, 0.0) / (n_samples - 1)
    else:
        var = 0.0
    scale = model.discount() * notional
    return McResult(mean=scale * mean_y,
                    std_error=scale * math.sqrt(var / n_samples),
                    paths=spec.paths)
