"""Request and response bodies for the HTTP service."""

from __future__ import annotations

from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from ..config import RunConfig

_STRICT = ConfigDict(extra="forbid")


class PortfolioRow(BaseModel):
    model_config = _STRICT

    instrument_type: Literal["cash", "put", "call", "digital_put", "digital_call"]
    strike: Optional[float] = None
    weight: float


class ReplicateRequest(BaseModel):
    model_config = _STRICT

    config: RunConfig
    emit_grid: bool = False


class ReplicateResponse(BaseModel):
    replication_value: float
    true_value: float
    abs_error: float
    notional: float
    n: int
    form: Literal["full", "reduced"]
    iterations_used: int
    residual: float
    converged: bool
    strikes: List[float]
    split_index: int
    portfolio: List[PortfolioRow]
    warnings: List[str] = []
    grid_history: Optional[List[List[float]]] = None


class ConvergeRequest(BaseModel):
    model_config = _STRICT

    config: RunConfig
    n_values: List[int] = Field(min_length=1)


class ConvergenceRowOut(BaseModel):
    n: int
    value: float
    error: float
    rate: Optional[float] = None


class ConvergeResponse(BaseModel):
    true_value: float
    rows: List[ConvergenceRowOut]
    warnings: List[str] = []


class QuadHedgeRequest(BaseModel):
    model_config = _STRICT

    config: RunConfig


class QuadHedgeRow(BaseModel):
    strike: float
    weight: float
    value_per_option: float
    cost_today: float


class QuadHedgeResponse(BaseModel):
    rows: List[QuadHedgeRow]
    total_cost: float
    residual_error: float
    condition_estimate: float
    warnings: List[str] = []


class PriceRequest(BaseModel):
    model_config = _STRICT

    config: RunConfig
    portfolio: Optional[List[PortfolioRow]] = None


class PriceResponse(BaseModel):
    payoff_value: Optional[float] = None
    portfolio_value: Optional[float] = None
    abs_error: Optional[float] = None
    discount: float
    warnings: List[str] = []


class McRequest(BaseModel):
    model_config = _STRICT

    config: RunConfig
    compare: bool = False


class McResponse(BaseModel):
    mean: float
    std_error: float
    paths: int
    comparison_value: Optional[float] = None
    warnings: List[str] = []


class HealthResponse(BaseModel):
    status: Literal["ok"]
    version: str
