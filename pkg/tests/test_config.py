"""Run-config schema, file loading, and dotted-path overrides."""

import json

import pytest

from staticrep import (
    ConfigError,
    CounterpartyModel,
    LognormalModel,
    SwaptionPayoff,
    VarianceSwapPayoff,
)
from staticrep.config import (
    apply_override,
    build_model,
    build_payoff,
    load_config,
    validate_config,
)

LOGNORMAL = {
    "model": {"model": "lognormal", "S0": 100.0, "r": 0.05,
              "sigma": 0.2, "T": 0.25},
    "payoff": {"type": "variance_swap"},
    "replication": {"n": 18, "X0": 45.0, "Xn": 140.0},
}

COUNTERPARTY = {
    "model": {"model": "counterparty", "S0": 100.0, "r": 0.05,
              "sigma1": 0.4, "sigma2": 0.2, "lambda": 0.5,
              "gammas": [0.5, 0.0, -0.2], "probs": [0.3, 0.5, 0.2],
              "T": 1.0},
    "payoff": {"type": "variance_swap"},
}


class TestSchema:
    def test_lognormal_round_trip(self):
        cfg = validate_config(LOGNORMAL)
        model = build_model(cfg.model)
        assert isinstance(model, LognormalModel)
        assert model.sigma == 0.2
        payoff = build_payoff(cfg.payoff, model)
        assert isinstance(payoff, VarianceSwapPayoff)
        assert payoff.T == 0.25

    def test_counterparty_lambda_alias(self):
        cfg = validate_config(COUNTERPARTY)
        model = build_model(cfg.model)
        assert isinstance(model, CounterpartyModel)
        assert model.lam == 0.5
        assert model.jump_fractions == (0.5, 0.0, -0.2)

    def test_swaption_payoff_needs_strike(self):
        data = json.loads(json.dumps(LOGNORMAL))
        data["payoff"] = {"type": "swaption_call"}
        with pytest.raises(ConfigError, match="K"):
            validate_config(data)
        data["payoff"]["K"] = 0.01
        cfg = validate_config(data)
        payoff = build_payoff(cfg.payoff, build_model(cfg.model))
        assert isinstance(payoff, SwaptionPayoff)
        assert payoff.side == "call"

    def test_missing_model_rejected(self):
        with pytest.raises(ConfigError, match="model"):
            validate_config({"payoff": {"type": "variance_swap"}})

    def test_unknown_keys_rejected(self):
        data = json.loads(json.dumps(LOGNORMAL))
        data["replication"]["smoothing"] = True
        with pytest.raises(ConfigError, match="smoothing"):
            validate_config(data)

    def test_defaults_populated(self):
        cfg = validate_config({"model": LOGNORMAL["model"]})
        assert cfg.replication.n == 18
        assert cfg.replication.form == "auto"
        assert cfg.replication.notional == 100.0
        assert cfg.quadrature.rule == "adaptive"
        assert cfg.mc.paths == 1_000_000
        assert cfg.u_method == "quadrature"
        assert cfg.payoff is None
        assert cfg.strikes is None


class TestOverrides:
    def test_numbers_parse_as_json(self):
        data = json.loads(json.dumps(LOGNORMAL))
        apply_override(data, "model.sigma=0.3")
        apply_override(data, "replication.n=40")
        assert data["model"]["sigma"] == 0.3
        assert data["replication"]["n"] == 40

    def test_strings_and_booleans(self):
        data = json.loads(json.dumps(LOGNORMAL))
        apply_override(data, "replication.form=reduced")
        apply_override(data, "mc.antithetic=true")
        assert data["replication"]["form"] == "reduced"
        assert data["mc"]["antithetic"] is True

    def test_lists_parse_as_json(self):
        data = json.loads(json.dumps(LOGNORMAL))
        apply_override(data, "strikes=[50, 70, 90]")
        assert data["strikes"] == [50, 70, 90]

    def test_missing_intermediate_objects_created(self):
        data = {"model": dict(LOGNORMAL["model"])}
        apply_override(data, "quadrature.abs_tol=1e-8")
        assert data["quadrature"]["abs_tol"] == 1e-8

    def test_malformed_assignment_rejected(self):
        with pytest.raises(ConfigError):
            apply_override({}, "replication.n")
        with pytest.raises(ConfigError):
            apply_override({}, "=5")

    def test_descending_into_scalar_rejected(self):
        data = json.loads(json.dumps(LOGNORMAL))
        with pytest.raises(ConfigError):
            apply_override(data, "model.sigma.deep=1")


class TestLoadConfig:
    def test_loads_and_applies_overrides(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps(LOGNORMAL))
        cfg = load_config(path, overrides=("model.sigma=0.6", "replication.n=158"))
        assert cfg.model.sigma == 0.6
        assert cfg.replication.n == 158

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="JSON"):
            load_config(path)

    def test_non_object_root(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2, 3]")
        with pytest.raises(ConfigError, match="object"):
            load_config(path)
