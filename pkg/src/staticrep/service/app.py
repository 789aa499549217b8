"""HTTP service exposing the replication pipeline.

Domain/config errors map to 422, numerical failures to 400 with
``{"kind": "numeric"}``, and convergence/conditioning warnings raised
during a computation are returned in the response's ``warnings`` list.
"""

from __future__ import annotations

import warnings

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, montecarlo, quadhedge, valuation
from ..config import (
    build_equidist_config,
    build_mc_spec,
    build_model,
    build_payoff,
    build_quadrature_spec,
)
from ..errors import (
    ConditioningWarning,
    ConfigError,
    ConvergenceWarning,
    NumericError,
    StaticRepError,
)
from ..spline import ReplicatingPortfolio
from . import schemas

_CAPTURED = (ConvergenceWarning, ConditioningWarning)


def _messages(caught):
    return [str(w.message) for w in caught if issubclass(w.category, _CAPTURED)]


def _require_payoff(cfg, model):
    if cfg.payoff is None:
        raise ConfigError("this operation needs a payoff block")
    return build_payoff(cfg.payoff, model)


def _strike_range(rep, payoff):
    """Resolve [X0, Xn]: explicit values win, else the payoff support."""
    X0, Xn = rep.X0, rep.Xn
    if X0 is None or Xn is None:
        if payoff.support is None:
            raise ConfigError(
                "replication.X0 and replication.Xn are required for payoffs "
                "without compact support"
            )
        lo, hi = payoff.support
        X0 = lo if X0 is None else X0
        Xn = hi if Xn is None else Xn
    if not 0 < X0 < Xn:
        raise ConfigError("strike range must satisfy 0 < X0 < Xn")
    return float(X0), float(Xn)


def create_app():
    app = FastAPI(title="staticrep", version=__version__)

    @app.exception_handler(NumericError)
    async def _numeric_error(request: Request, exc: NumericError):
        return JSONResponse(status_code=400,
                            content={"kind": "numeric", "detail": str(exc)})

    @app.exception_handler(StaticRepError)
    async def _domain_error(request: Request, exc: StaticRepError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/replicate", response_model=schemas.ReplicateResponse)
    def replicate(req: schemas.ReplicateRequest):
        cfg = req.config
        model = build_model(cfg.model)
        payoff = _require_payoff(cfg, model)
        spec = build_quadrature_spec(cfg.quadrature)
        X0, Xn = _strike_range(cfg.replication, payoff)
        equi = build_equidist_config(cfg.replication, X0, Xn,
                                     keep_history=req.emit_grid)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            report, portfolio, result = valuation.replicate(
                payoff, model, equi,
                form=cfg.replication.form,
                notional=cfg.replication.notional,
                spec=spec,
                split_index=cfg.replication.split_index,
            )
        history = None
        if req.emit_grid and result.history is not None:
            history = [[float(x) for x in grid] for grid in result.history]
        return schemas.ReplicateResponse(
            replication_value=report.replication_value,
            true_value=report.true_value,
            abs_error=report.abs_error,
            notional=report.notional,
            n=report.n,
            form=report.form,
            iterations_used=report.iterations_used,
            residual=report.residual,
            converged=report.converged,
            strikes=[float(x) for x in result.grid.strikes],
            split_index=result.grid.split_index,
            portfolio=[schemas.PortfolioRow(**row) for row in portfolio.to_rows()],
            warnings=_messages(caught),
            grid_history=history,
        )

    @app.post("/converge", response_model=schemas.ConvergeResponse)
    def converge(req: schemas.ConvergeRequest):
        cfg = req.config
        model = build_model(cfg.model)
        payoff = _require_payoff(cfg, model)
        spec = build_quadrature_spec(cfg.quadrature)
        X0, Xn = _strike_range(cfg.replication, payoff)
        equi = build_equidist_config(cfg.replication, X0, Xn)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            study = valuation.convergence_study(
                payoff, model, req.n_values, equi,
                form=cfg.replication.form,
                notional=cfg.replication.notional,
                spec=spec,
            )
        return schemas.ConvergeResponse(
            true_value=study.true_value,
            rows=[schemas.ConvergenceRowOut(n=row.n, value=row.value,
                                            error=row.error, rate=row.rate)
                  for row in study.rows],
            warnings=_messages(caught),
        )

    @app.post("/quad-hedge", response_model=schemas.QuadHedgeResponse)
    def quad_hedge(req: schemas.QuadHedgeRequest):
        cfg = req.config
        if not cfg.strikes:
            raise ConfigError("quad-hedge needs a non-empty top-level strikes list")
        model = build_model(cfg.model)
        payoff = _require_payoff(cfg, model)
        spec = build_quadrature_spec(cfg.quadrature)
        problem = quadhedge.QuadHedgeProblem(
            fixed_strikes=tuple(cfg.strikes), payoff=payoff, model=model,
            notional=cfg.replication.notional,
        )
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            sol = quadhedge.solve(problem, u_method=cfg.u_method, spec=spec)
        rows = [
            schemas.QuadHedgeRow(strike=float(k), weight=float(w),
                                 value_per_option=float(p), cost_today=float(c))
            for k, w, p, c in zip(sol.strikes, sol.weights,
                                  sol.per_option_price, sol.per_option_cost)
        ]
        return schemas.QuadHedgeResponse(
            rows=rows,
            total_cost=sol.total_cost,
            residual_error=sol.residual_error,
            condition_estimate=sol.condition_estimate,
            warnings=_messages(caught),
        )

    @app.post("/price", response_model=schemas.PriceResponse)
    def price(req: schemas.PriceRequest):
        cfg = req.config
        model = build_model(cfg.model)
        if cfg.payoff is None and req.portfolio is None:
            raise ConfigError("price needs a payoff block, a portfolio, or both")
        spec = build_quadrature_spec(cfg.quadrature)
        payoff_value = portfolio_value = abs_error = None
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            if cfg.payoff is not None:
                payoff = build_payoff(cfg.payoff, model)
                payoff_value = valuation.true_value(
                    payoff, model, cfg.replication.notional, spec)
            if req.portfolio is not None:
                rows = [row.model_dump() for row in req.portfolio]
                portfolio_value = valuation.price_portfolio(
                    ReplicatingPortfolio.from_rows(rows), model)
        if payoff_value is not None and portfolio_value is not None:
            abs_error = abs(payoff_value - portfolio_value)
        return schemas.PriceResponse(
            payoff_value=payoff_value,
            portfolio_value=portfolio_value,
            abs_error=abs_error,
            discount=model.discount(),
            warnings=_messages(caught),
        )

    @app.post("/mc", response_model=schemas.McResponse)
    def mc(req: schemas.McRequest):
        cfg = req.config
        model = build_model(cfg.model)
        payoff = _require_payoff(cfg, model)
        mc_spec = build_mc_spec(cfg.mc)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            result = montecarlo.estimate(payoff, model, mc_spec,
                                         notional=cfg.replication.notional)
            comparison = None
            if req.compare:
                spec = build_quadrature_spec(cfg.quadrature)
                comparison = valuation.true_value(
                    payoff, model, cfg.replication.notional, spec)
        return schemas.McResponse(
            mean=result.mean,
            std_error=result.std_error,
            paths=result.paths,
            comparison_value=comparison,
            warnings=_messages(caught),
        )

    return app
