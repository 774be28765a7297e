"""HTTP facade over the experiment harness.

Endpoints: POST /run, /sweep, /validate, /selftest and GET /health.
Request bodies mirror the flat run config; unknown fields are rejected at
the model boundary with HTTP 422 and config-level problems map to 400.
"""

from __future__ import annotations

from dataclasses import fields
from typing import get_type_hints

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, create_model

from . import __version__
from .harness import (ConfigError, RegretReport, RunConfig, run_experiment, sweep,
                      validate_config)
from .selftest import run_selftest

# request model generated from the config dataclass so the two cannot drift
_hints = get_type_hints(RunConfig)
_config_fields = {f.name: (_hints[f.name], f.default) for f in fields(RunConfig)}
RunRequest = create_model(
    "RunRequest",
    __config__=ConfigDict(extra="forbid"),
    include_trajectory=(bool, False),
    **_config_fields,
)
SweepRequest = create_model(
    "SweepRequest",
    __config__=ConfigDict(extra="forbid"),
    **_config_fields,
)


class Trajectory(BaseModel):
    t: list[int]
    cumulative_loss: list[float]
    regret: list[float]
    bound: list[float] | None = None


class RunResponse(BaseModel):
    final_regret: float
    final_cumulative_loss: float
    final_bound: float | None
    horizon: int
    n_tasks: int
    dim: int
    b: float
    eta: float | None
    oracle_eta: float | None
    lipschitz: float
    comparator_values: list[float]
    comparator_total: float
    variance_measured: float
    variance_threshold: float
    comparator_in_set: bool
    realized_grad_bound: float
    grad_sq_sum: float
    clamped_rounds: int
    seed: int
    wall_clock_s: float
    trajectory: Trajectory | None = None


class SweepCell(BaseModel):
    b: float | None
    sigma: float
    n_tasks: int
    eta: float | None
    repetitions: int
    mean_final_regret: float
    std_final_regret: float
    mean_final_bound: float | None


class SweepResponse(BaseModel):
    cells: list[SweepCell]


class ValidateResponse(BaseModel):
    ok: bool
    learner: str
    env: str
    tuning: str
    n_tasks: int
    dim: int
    t_horizon: int


class SelftestResponse(BaseModel):
    ok: bool
    lines: list[str]


class HealthResponse(BaseModel):
    status: str
    version: str


app = FastAPI(title="mtomd", version=__version__)


def _config_from(payload: dict) -> RunConfig:
    try:
        return RunConfig.from_dict(payload)
    except ConfigError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None


def _guarded(fn, *args):
    try:
        return fn(*args)
    except ConfigError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None
    except Exception as exc:
        raise HTTPException(status_code=500,
                            detail=f"{type(exc).__name__}: {exc}") from None


def _run_response(report: RegretReport, include_trajectory: bool) -> RunResponse:
    trajectory = None
    if include_trajectory:
        trajectory = Trajectory(
            t=list(range(1, report.horizon + 1)),
            cumulative_loss=[float(v) for v in report.cumulative_loss],
            regret=[float(v) for v in report.regret],
            bound=None if report.bound is None else [float(v) for v in report.bound],
        )
    return RunResponse(
        final_regret=report.final_regret,
        final_cumulative_loss=float(report.cumulative_loss[-1]),
        final_bound=None if report.bound is None else float(report.bound[-1]),
        horizon=report.horizon,
        n_tasks=report.n_tasks,
        dim=report.dim,
        b=report.b,
        eta=report.eta,
        oracle_eta=report.oracle_eta,
        lipschitz=report.lipschitz,
        comparator_values=[float(v) for v in report.comparator_values],
        comparator_total=report.comparator_total,
        variance_measured=report.variance_measured,
        variance_threshold=report.variance_threshold,
        comparator_in_set=report.comparator_in_set,
        realized_grad_bound=report.realized_grad_bound,
        grad_sq_sum=report.grad_sq_sum,
        clamped_rounds=report.clamped_rounds,
        seed=report.seed,
        wall_clock_s=report.wall_clock,
        trajectory=trajectory,
    )


@app.post("/run", response_model=RunResponse)
def run_endpoint(req: RunRequest) -> RunResponse:
    payload = req.model_dump()
    include = payload.pop("include_trajectory")
    cfg = _config_from(payload)
    report = _guarded(run_experiment, cfg)
    return _run_response(report, include)


@app.post("/sweep", response_model=SweepResponse)
def sweep_endpoint(req: SweepRequest) -> SweepResponse:
    cfg = _config_from(req.model_dump())
    rows = _guarded(sweep, cfg)
    return SweepResponse(cells=[SweepCell(**row) for row in rows])


@app.post("/validate", response_model=ValidateResponse)
def validate_endpoint(req: SweepRequest) -> ValidateResponse:
    cfg = _config_from(req.model_dump())
    info = _guarded(validate_config, cfg)
    return ValidateResponse(ok=True, **info)


@app.post("/selftest", response_model=SelftestResponse)
def selftest_endpoint() -> SelftestResponse:
    lines: list[str] = []
    ok = run_selftest(lines.append)
    return SelftestResponse(ok=ok, lines=lines)


@app.get("/health", response_model=HealthResponse)
def health_endpoint() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)
