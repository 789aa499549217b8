"""Run configuration: schema validation, file loading, and dotted-path
overrides.

A run config is a single JSON document with blocks for the model, the
payoff, replication controls, quadrature controls, and Monte-Carlo
controls. Unknown keys are rejected everywhere.
"""

from __future__ import annotations

import json
from typing import Annotated, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .equidist import EquidistConfig
from .errors import ConfigError
from .models import CounterpartyModel, LognormalModel
from .montecarlo import McSpec
from .payoffs import swaption, variance_swap
from .quadrature import QuadratureSpec

_STRICT = ConfigDict(extra="forbid", populate_by_name=True, protected_namespaces=())


class LognormalModelCfg(BaseModel):
    model_config = _STRICT

    model: Literal["lognormal"]
    S0: float = Field(gt=0)
    r: float
    sigma: float = Field(gt=0)
    T: float = Field(gt=0)


class CounterpartyModelCfg(BaseModel):
    model_config = _STRICT

    model: Literal["counterparty"]
    S0: float = Field(gt=0)
    r: float
    sigma1: float = Field(gt=0)
    sigma2: float = Field(gt=0)
    lam: float = Field(alias="lambda", ge=0)
    gammas: List[float]
    probs: List[float]
    T: float = Field(gt=0)


ModelCfg = Annotated[Union[LognormalModelCfg, CounterpartyModelCfg],
                     Field(discriminator="model")]


class PayoffCfg(BaseModel):
    model_config = _STRICT

    type: Literal["variance_swap", "swaption_put", "swaption_call"]
    K: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _require_strike(self):
        if self.type.startswith("swaption") and self.K is None:
            raise ValueError("swaption payoffs need a variance strike K")
        return self


class ReplicationCfg(BaseModel):
    model_config = _STRICT

    n: int = Field(default=18, ge=2)
    X0: Optional[float] = Field(default=None, gt=0)
    Xn: Optional[float] = Field(default=None, gt=0)
    gamma_exponent: float = Field(default=0.4, gt=0, le=2)
    form: Literal["auto", "full", "reduced"] = "auto"
    notional: float = 100.0
    rho_rule: Literal["rectangle", "quadrature"] = "rectangle"
    max_iterations: int = Field(default=100, ge=1)
    move_tol: float = Field(default=1e-8, gt=0)
    split_index: Optional[int] = Field(default=None, ge=0)


class QuadratureCfg(BaseModel):
    model_config = _STRICT

    rule: Literal["adaptive", "composite-simpson", "rectangle"] = "adaptive"
    abs_tol: float = Field(default=1e-10, gt=0)
    max_subdivisions: int = Field(default=2 ** 20, ge=1)


class McCfg(BaseModel):
    model_config = _STRICT

    paths: int = Field(default=1_000_000, ge=1)
    seed: int = 12345
    antithetic: bool = False


class RunConfig(BaseModel):
    model_config = _STRICT

    model: ModelCfg
    payoff: Optional[PayoffCfg] = None
    replication: ReplicationCfg = ReplicationCfg()
    quadrature: QuadratureCfg = QuadratureCfg()
    mc: McCfg = McCfg()
    strikes: Optional[List[float]] = None
    u_method: Literal["quadrature", "replication"] = "quadrature"


def build_model(cfg):
    """Instantiate the pricing model named by a validated model block."""
    if isinstance(cfg, LognormalModelCfg):
        return LognormalModel(S0=cfg.S0, r=cfg.r, sigma=cfg.sigma, T=cfg.T)
    return CounterpartyModel(S0=cfg.S0, r=cfg.r, sigma1=cfg.sigma1, sigma2=cfg.sigma2,
                             lam=cfg.lam, jump_fractions=tuple(cfg.gammas),
                             jump_probs=tuple(cfg.probs), T=cfg.T)


def build_payoff(cfg, model):
    """Instantiate the payoff named by a validated payoff block.

    The spot and maturity come from the model block.
    """
    if cfg.type == "variance_swap":
        return variance_swap(model.S0, model.T)
    side = "put" if cfg.type == "swaption_put" else "call"
    return swaption(model.S0, model.T, cfg.K, side=side)


def build_quadrature_spec(cfg):
    return QuadratureSpec(rule=cfg.rule, abs_tol=cfg.abs_tol,
                          max_subdivisions=cfg.max_subdivisions)


def build_equidist_config(rep, X0, Xn, keep_history=False):
    return EquidistConfig(n=rep.n, X0=X0, Xn=Xn, gamma_exponent=rep.gamma_exponent,
                          max_iterations=rep.max_iterations, move_tol=rep.move_tol,
                          rho_rule=rep.rho_rule, keep_history=keep_history)


def build_mc_spec(cfg):
    return McSpec(paths=cfg.paths, seed=cfg.seed, antithetic=cfg.antithetic)


def _parse_override_value(raw):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def apply_override(data, assignment):
    """Apply one ``dotted.key=value`` override onto a config dict."""
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} is not of the form key=value")
    key, raw = assignment.split("=", 1)
    parts = [p for p in key.strip().split(".") if p]
    if not parts:
        raise ConfigError(f"override {assignment!r} has an empty key")
    node = data
    for part in parts[:-1]:
        nxt = node.get(part)
        if nxt is None:
            nxt = node[part] = {}
        elif not isinstance(nxt, dict):
            raise ConfigError(f"override key {key!r} descends into a non-object value")
        node = nxt
    node[parts[-1]] = _parse_override_value(raw)
    return data


def validate_config(data):
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path, overrides=()):
    """Read a JSON config file and apply ``--set`` overrides in order."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    for assignment in overrides:
        apply_override(data, assignment)
    return validate_config(data)
