"""Shared fixtures: the base lognormal market and common payoffs."""

import warnings

import pytest

from staticrep import (
    ConvergenceWarning,
    CounterpartyModel,
    LognormalModel,
    QuadratureSpec,
    variance_swap,
)

# Base market used across the numeric tables: spot 100, 5% rate,
# 20% volatility, three-month horizon.
BASE = dict(S0=100.0, r=0.05, sigma=0.2, T=0.25)


@pytest.fixture(scope="session")
def base_model():
    return LognormalModel(**BASE)


@pytest.fixture(scope="session")
def base_swap():
    return variance_swap(BASE["S0"], BASE["T"])


@pytest.fixture(scope="session")
def cp_model():
    """Jump-at-default mixture shared by the counterparty-risk tests."""
    return CounterpartyModel(
        S0=100.0, r=0.05, sigma1=0.4, sigma2=0.2, lam=0.5,
        jump_fractions=(0.5, 0.0, -0.2), jump_probs=(0.3, 0.5, 0.2), T=1.0,
    )


@pytest.fixture(scope="session")
def fast_spec():
    """Loose adaptive budget for tests that only need a few digits."""
    return QuadratureSpec(rule="adaptive", abs_tol=1e-8)


@pytest.fixture()
def quiet_convergence():
    """Silence the strike-iteration warning for kinked auxiliary payoffs."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        yield
