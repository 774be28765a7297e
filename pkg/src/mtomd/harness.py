"""Experiment runner: flat run configs, the predict/loss/step loop, exact
batch comparators, regret and bound trajectories, grid sweeps, and
deterministic CSV reports with a JSON metadata sidecar.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from collections import defaultdict
from dataclasses import asdict, dataclass, fields, replace
from types import SimpleNamespace

import numpy as np

from .compound import CompoundVector
from .environment import (Round, ScheduleSpec, SimplexTaskSpec, SyntheticTaskSpec,
                          batch_comparator, lipschitz_bound, load_csv,
                          logwealth_clamped, loss_subgradient, loss_value,
                          make_lower_bound_instance, make_lower_bound_rounds,
                          make_synthetic, make_synthetic_simplex)
from .geometry import Regularizer, euclidean, negentropy, norm, pnorm as pnorm_reg
from .interaction import InteractionOperator, clique_operator, laplacian_operator, load_graph
from .learners import (GenericMTOMD, IndependentEG, IndependentOGD, LearnerConfig,
                       MultitaskEG, MultitaskOGD, RateSchedule, adaptive_schedule,
                       constant_rate, mahalanobis_ball, mahalanobis_radius, norm_ball,
                       p_star_norm_choice, resolve_rate, simplex_set)
from .variance import VarianceSpec, admissible_b_simplex

LEARNER_KINDS = ("i-ogd", "mt-ogd", "i-eg", "mt-eg", "mt-pnorm", "generic")
ENV_KINDS = ("synthetic", "simplex", "lower_bound", "csv")
TUNING_KINDS = ("theory", "fixed", "oracle", "adaptive")
SCHEDULE_KINDS = ("round_robin", "uniform_random", "blocked")
REGULARIZER_KINDS = ("euclidean", "pnorm", "negentropy")
LOSS_KIND_CHOICES = ("square", "logistic", "logwealth", "linear")

SPREAD_CAP = 0.35    # derived synthetic dispersion never exceeds this times D


class ConfigError(ValueError):
    """Invalid run configuration; the CLI maps this to exit code 1."""


@dataclass
class RunConfig:
    """Flat experiment description.  Unknown keys are rejected at parse
    time: a silently ignored typo in eta or b corrupts the measurement."""

    experiment: str = "run"
    learner: str = "mt-ogd"
    env: str = "synthetic"
    schedule: str = "round_robin"
    block_len: int = 1
    n_tasks: int = 4
    dim: int = 5
    t_horizon: int = 1000
    b: float | None = None
    sigma: float = 0.1
    diameter: float = 1.0
    tuning: str = "theory"
    eta: float | None = None
    eta_grid: list[float] | None = None
    lipschitz: float | None = None
    regularizer: str | None = None        # generic learner only
    p: float | None = None                # p-norm exponent override
    seed: int = 0
    repetitions: int = 1
    center_norm: float = 0.35
    spread: float | None = None
    noise_std: float = 0.0
    csv_path: str | None = None
    task_col: str | None = None
    label_col: str | None = None
    feature_cols: list[str] | None = None
    loss_kind: str = "square"
    graph_file: str | None = None
    b_grid: list[float] | None = None
    sigma_grid: list[float] | None = None
    n_tasks_grid: list[int] | None = None

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError(f"config must be a JSON object, got {type(raw).__name__}")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(f"unknown config key(s): {unknown}")
        return cls(**raw)

    def __post_init__(self):
        def bad(msg):
            raise ConfigError(msg)

        # shape checks run first so a list or string where a scalar belongs
        # fails as a config error instead of a TypeError in a range check
        def wrong(name, val, want):
            hint = (f"; sweep it with {name}_grid"
                    if name in ("b", "sigma", "eta", "n_tasks")
                    and isinstance(val, list) else "")
            bad(f"{name} must be {want}, got {type(val).__name__}{hint}")

        for name in ("experiment", "learner", "env", "schedule", "tuning",
                     "loss_kind", "regularizer", "csv_path", "task_col",
                     "label_col", "graph_file"):
            val = getattr(self, name)
            if val is not None and not isinstance(val, str):
                wrong(name, val, "a string")
        for name in ("block_len", "n_tasks", "dim", "t_horizon", "seed",
                     "repetitions"):
            val = getattr(self, name)
            if isinstance(val, bool) or not isinstance(val, int):
                wrong(name, val, "an integer")
        for name in ("b", "sigma", "eta", "diameter", "center_norm",
                     "noise_std", "lipschitz", "p", "spread"):
            val = getattr(self, name)
            if val is not None and (isinstance(val, bool)
                                    or not isinstance(val, (int, float))):
                wrong(name, val, "a number")
        for name in ("eta_grid", "b_grid", "sigma_grid", "n_tasks_grid"):
            val = getattr(self, name)
            if val is not None and (not isinstance(val, list) or any(
                    isinstance(v, bool) or not isinstance(v, (int, float))
                    for v in val)):
                bad(f"{name} must be a list of numbers")
        if self.feature_cols is not None and (
                not isinstance(self.feature_cols, list)
                or not all(isinstance(c, str) for c in self.feature_cols)):
            bad("feature_cols must be a list of column names")

        if self.learner not in LEARNER_KINDS:
            bad(f"learner must be one of {LEARNER_KINDS}, got {self.learner!r}")
        if self.env not in ENV_KINDS:
            bad(f"env must be one of {ENV_KINDS}, got {self.env!r}")
        if self.tuning not in TUNING_KINDS:
            bad(f"tuning must be one of {TUNING_KINDS}, got {self.tuning!r}")
        if self.schedule not in SCHEDULE_KINDS:
            bad(f"schedule must be one of {SCHEDULE_KINDS}, got {self.schedule!r}")
        if self.loss_kind not in LOSS_KIND_CHOICES:
            bad(f"loss_kind must be one of {LOSS_KIND_CHOICES}, got {self.loss_kind!r}")
        if self.regularizer is not None and self.regularizer not in REGULARIZER_KINDS:
            bad(f"regularizer must be one of {REGULARIZER_KINDS}, got {self.regularizer!r}")
        if min(self.n_tasks, self.dim, self.t_horizon, self.repetitions, self.block_len) < 1:
            bad("n_tasks, dim, t_horizon, repetitions, block_len must be >= 1")
        if not 0.0 <= self.sigma <= 1.0:
            bad(f"sigma must lie in [0, 1], got {self.sigma}")
        if self.diameter <= 0:
            bad("diameter must be positive")
        if self.b is not None and self.b < 0:
            bad("b must be nonnegative")
        if self.lipschitz is not None and self.lipschitz <= 0:
            bad("lipschitz must be positive")
        if self.p is not None and not 1.0 < self.p <= 2.0:
            bad(f"p must lie in (1, 2], got {self.p}")
        if self.tuning == "fixed" and (self.eta is None or self.eta <= 0):
            bad("fixed tuning requires eta > 0")
        if self.tuning == "oracle":
            if not self.eta_grid or any(e <= 0 for e in self.eta_grid):
                bad("oracle tuning requires a nonempty positive eta_grid")
        if self.tuning == "adaptive":
            if self._family() != "euclidean" or self.learner.startswith("i-"):
                bad("adaptive tuning is defined for the shared Euclidean learners")
            if self.b is not None and self.b != self.n_tasks:
                bad("adaptive tuning assumes the default interaction strength")
        if self.env == "csv":
            if not (self.csv_path and self.task_col and self.feature_cols):
                bad("csv env requires csv_path, task_col, feature_cols")
        if self.env == "lower_bound":
            if self.n_tasks != 2 * self.dim:
                bad("lower_bound env requires n_tasks == 2*dim")
            if not 0.0 < self.sigma < 1.0 / math.sqrt(2.0):
                bad("lower_bound env requires sigma in (0, 1/sqrt(2))")
            if self._family() != "euclidean":
                bad("lower_bound env drives the Euclidean learners")
        if self._family() != "euclidean" and self.env in ("synthetic", "lower_bound"):
            bad(f"{self.learner} needs simplex-valued streams (env simplex or csv)")
        if self.learner.startswith("i-") and self.b not in (None, 0, 0.0):
            bad("independent learners have no interaction; leave b unset or 0")
        if self.learner == "mt-pnorm" and self.p is None and self.dim < 3:
            bad("mt-pnorm with the default exponent needs dim >= 3")

    def _family(self) -> str:
        """Regularizer family implied by the learner selection."""
        if self.learner in ("i-ogd", "mt-ogd"):
            return "euclidean"
        if self.learner in ("i-eg", "mt-eg"):
            return "negentropy"
        if self.learner == "mt-pnorm":
            return "pnorm"
        return self.regularizer or "euclidean"


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such config file") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    return RunConfig.from_dict(raw)


def validate_config(cfg: RunConfig) -> dict:
    """Dry-run checks: referenced files exist and parse, the interaction
    operator constructs.  Returns a summary of the resolved run."""
    import csv as _csv
    import os

    if cfg.env == "csv":
        if not os.path.exists(cfg.csv_path):
            raise ConfigError(f"{cfg.csv_path}: no such data file")
        with open(cfg.csv_path, "r", encoding="utf-8", newline="") as fh:
            header = next(_csv.reader(fh), None)
        if header is None:
            raise ConfigError(f"{cfg.csv_path}: empty file")
        wanted = [cfg.task_col, *cfg.feature_cols] + ([cfg.label_col] if cfg.label_col else [])
        missing = [c for c in wanted if c not in header]
        if missing:
            raise ConfigError(f"{cfg.csv_path}: missing column(s) {missing}")
    if cfg.graph_file is not None:
        try:
            laplacian_operator(load_graph(cfg.graph_file))
        except (OSError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
    return {
        "learner": cfg.learner,
        "env": cfg.env,
        "tuning": cfg.tuning,
        "n_tasks": cfg.n_tasks,
        "dim": cfg.dim,
        "t_horizon": cfg.t_horizon,
    }


# ---------------------------------------------------------------------------
# wiring

def _regularizer(cfg: RunConfig, dim: int) -> Regularizer:
    fam = cfg._family()
    if fam == "euclidean":
        return euclidean()
    if fam == "negentropy":
        return negentropy()
    p = cfg.p if cfg.p is not None else p_star_norm_choice(dim)
    return pnorm_reg(p)


def _default_b(cfg: RunConfig, N: int) -> float:
    if cfg._family() == "negentropy":
        return admissible_b_simplex(cfg.sigma)
    return float(N)


def _operator(cfg: RunConfig, N: int) -> tuple[InteractionOperator, float]:
    """Interaction operator plus the effective b used by radius and bound
    formulas (top eigenvalue minus one for graph operators)."""
    if cfg.learner.startswith("i-"):
        return clique_operator(N, 0.0), 0.0
    if cfg.graph_file is not None:
        op = laplacian_operator(load_graph(cfg.graph_file))
        if op.n_tasks != N:
            raise ConfigError(f"graph has {op.n_tasks} nodes but the stream has {N} tasks")
        b_eff = float(np.linalg.eigvalsh(op.matrix).max() - 1.0)
        return op, b_eff
    b = cfg.b if cfg.b is not None else _default_b(cfg, N)
    op = clique_operator(N, b)
    return op, float(op.b)


def _feasible(cfg: RunConfig, reg: Regularizer, b_eff: float, N: int):
    if reg.domain == "simplex":
        return simplex_set()
    if reg.kind == "pnorm":
        # simplex-valued comparators sit inside the unit p-norm ball
        return norm_ball(reg.primal_norm, 1.0)
    if cfg.learner == "i-ogd":
        return norm_ball(reg.primal_norm, cfg.diameter)
    return mahalanobis_ball(mahalanobis_radius(b_eff, cfg.sigma, N, cfg.diameter))


def _comparator_feasible(cfg: RunConfig, reg: Regularizer):
    if cfg.env == "simplex" or (cfg.env == "csv" and reg.kind != "euclidean"):
        return simplex_set()
    return norm_ball(reg.primal_norm, cfg.diameter)


def _variance_spec(cfg: RunConfig, reg: Regularizer) -> VarianceSpec:
    sigma = 0.0 if cfg.learner.startswith("i-") else cfg.sigma
    if reg.domain == "simplex":
        return VarianceSpec("simplex", sigma)
    D = 1.0 if reg.kind == "pnorm" else cfg.diameter
    return VarianceSpec("norm", sigma, diameter=D)


def _pred_cap(cfg: RunConfig, op: InteractionOperator, b_eff: float, N: int) -> float:
    if cfg._family() == "pnorm":
        return 1.0          # l2 norm of any iterate is at most its p-norm
    if cfg.learner == "i-ogd":
        return cfg.diameter
    # per-block norm inside the transformed ball: ||x_i|| <= sqrt((A^-1)_ii) R
    radius = mahalanobis_radius(b_eff, cfg.sigma, N, cfg.diameter)
    return math.sqrt(op.max_inv_diag) * radius


def _build_environment(cfg: RunConfig) -> tuple[list[Round], int, int]:
    if cfg.env == "synthetic":
        spread = cfg.spread if cfg.spread is not None else (
            min(0.95 * cfg.sigma, SPREAD_CAP) * cfg.diameter)
        spec = SyntheticTaskSpec(cfg.n_tasks, cfg.dim, center_norm=cfg.center_norm,
                                 spread=spread, noise_std=cfg.noise_std, seed=cfg.seed,
                                 max_block_norm=cfg.diameter)
        sched = ScheduleSpec(cfg.schedule, seed=cfg.seed + 1_000_003, block_len=cfg.block_len)
        rounds, _ = make_synthetic(spec, cfg.t_horizon, sched)
        return rounds, cfg.n_tasks, cfg.dim
    if cfg.env == "simplex":
        target = min(cfg.spread ** 2, 0.95) if cfg.spread is not None else 0.9 * cfg.sigma ** 2
        spec = SimplexTaskSpec(cfg.n_tasks, cfg.dim, target_range_var=target,
                               noise_std=cfg.noise_std, seed=cfg.seed)
        sched = ScheduleSpec(cfg.schedule, seed=cfg.seed + 1_000_003, block_len=cfg.block_len)
        rounds, _ = make_synthetic_simplex(spec, cfg.t_horizon, sched)
        return rounds, cfg.n_tasks, cfg.dim
    if cfg.env == "lower_bound":
        U = make_lower_bound_instance(cfg.dim, cfg.sigma)
        per_task = max((cfg.t_horizon // cfg.n_tasks) // 2 * 2, 2)
        rounds = make_lower_bound_rounds(U, per_task)
        return rounds, cfg.n_tasks, cfg.dim
    rounds, n_tasks = load_csv(cfg.csv_path, cfg.task_col, list(cfg.feature_cols),
                               label_col=cfg.label_col, loss_kind=cfg.loss_kind)
    return rounds, n_tasks, rounds[0].loss.features.shape[0]


def _make_learner(cfg: RunConfig, lc: LearnerConfig, dim: int):
    cls = {"i-ogd": IndependentOGD, "mt-ogd": MultitaskOGD,
           "i-eg": IndependentEG, "mt-eg": MultitaskEG}.get(cfg.learner, GenericMTOMD)
    return cls(lc, dim)


def _theory_schedule(cfg: RunConfig, reg: Regularizer, op: InteractionOperator,
                     b_eff: float, N: int, dim: int, T: int, L: float) -> RateSchedule:
    sigma = 0.0 if cfg.learner.startswith("i-") else cfg.sigma
    D = 1.0 if reg.kind == "pnorm" else cfg.diameter
    if op.closed_form:
        kind = {"euclidean": "theory_ogd", "pnorm": "theory_pnorm",
                "negentropy": "theory_eg"}[reg.kind]
        return resolve_rate(RateSchedule(kind), regularizer=reg, D=D, L=L, N=N,
                            sigma=sigma, T=T, b=b_eff, dim=dim)
    # graph operator: balance the Bregman cap against the realized diagonal
    breg = _breg_cap(cfg, reg, b_eff, N, dim, local=True)
    eta = math.sqrt(2.0 * reg.lam * breg / (op.max_inv_diag * T * L ** 2))
    return constant_rate(eta)


def _breg_cap(cfg: RunConfig, reg: Regularizer, b_eff: float, N: int, dim: int,
              local: bool = False) -> float:
    """Worst-case Bregman divergence from the start point to any comparator."""
    if reg.kind == "negentropy":
        return N * math.log(dim)
    sigma = 0.0 if cfg.learner.startswith("i-") else cfg.sigma
    D = 1.0 if reg.kind == "pnorm" else cfg.diameter
    if local:
        cap = 0.5 * (N * D ** 2 + sigma ** 2 * D ** 2)
    else:
        cap = 0.5 * N * D ** 2 * (1.0 + b_eff * (N - 1) * sigma ** 2 / N)
    if reg.kind == "pnorm":
        cap *= 4.0
    return cap


def _bound_curve(cfg: RunConfig, reg: Regularizer, op: InteractionOperator,
                 b_eff: float, N: int, dim: int, T: int, L: float,
                 sched: RateSchedule, gsq_cum: np.ndarray) -> np.ndarray | None:
    sigma = 0.0 if cfg.learner.startswith("i-") else cfg.sigma
    if cfg.tuning == "adaptive":
        acc = math.sqrt(1.0 + sigma ** 2 * (N - 1))
        return 8.0 * cfg.diameter * acc * np.sqrt(gsq_cum)
    if cfg.tuning != "theory":
        return None
    breg = _breg_cap(cfg, reg, b_eff, N, dim, local=not op.closed_form)
    t = np.arange(1, T + 1, dtype=float)
    return breg / sched.eta + op.max_inv_diag * sched.eta * L ** 2 * t / (2.0 * reg.lam)


# ---------------------------------------------------------------------------
# running

@dataclass
class RegretReport:
    config: RunConfig
    horizon: int
    n_tasks: int
    dim: int
    b: float
    eta: float | None
    oracle_eta: float | None
    lipschitz: float
    cumulative_loss: np.ndarray
    regret: np.ndarray
    bound: np.ndarray | None
    comparator: CompoundVector
    comparator_values: np.ndarray
    comparator_total: float
    variance_measured: float
    variance_threshold: float
    comparator_in_set: bool
    realized_grad_bound: float
    grad_sq_sum: float
    clamped_rounds: int
    seed: int
    wall_clock: float

    @property
    def final_regret(self) -> float:
        return float(self.regret[-1])


def _single_pass(cfg: RunConfig, lc: LearnerConfig, dim: int,
                 rounds: list[Round]) -> SimpleNamespace:
    learner = _make_learner(cfg, lc, dim)
    dual = lc.regularizer.dual_norm
    T = len(rounds)
    cum_loss = np.empty(T)
    gsq_cum = np.empty(T)
    total, gsq, gmax, clamped = 0.0, 0.0, 0.0, 0
    for t, r in enumerate(rounds):
        i = r.active_task
        x = learner.predict(i)
        total += loss_value(r.loss, x)
        if logwealth_clamped(r.loss, x):
            clamped += 1
        g = loss_subgradient(r.loss, x)
        gd = norm(g, dual)
        gsq += gd * gd
        gmax = max(gmax, gd)
        learner.step(i, g)
        cum_loss[t] = total
        gsq_cum[t] = gsq
    return SimpleNamespace(cum_loss=cum_loss, gsq_cum=gsq_cum, grad_max=gmax,
                           clamped=clamped)


def _comparators(rounds: list[Round], N: int, dim: int,
                 feasible) -> tuple[CompoundVector, np.ndarray]:
    by_task: dict[int, list[Round]] = defaultdict(list)
    for r in rounds:
        by_task[r.active_task].append(r)
    blocks = np.full((N, dim), 1.0 / dim) if feasible.kind == "simplex" else np.zeros((N, dim))
    values = np.zeros(N)
    for i, task_rounds in by_task.items():
        blocks[i], values[i] = batch_comparator(task_rounds, feasible)
    return CompoundVector(blocks), values


def run_experiment(cfg: RunConfig) -> RegretReport:
    start = time.perf_counter()
    rounds, N, dim = _build_environment(cfg)
    T = len(rounds)
    reg = _regularizer(cfg, dim)
    op, b_eff = _operator(cfg, N)
    feasible = _feasible(cfg, reg, b_eff, N)
    vspec = _variance_spec(cfg, reg)

    if cfg.lipschitz is not None:
        L = cfg.lipschitz
    else:
        L = lipschitz_bound(rounds, reg.dual_norm,
                            pred_norm_cap=None if feasible.kind == "simplex"
                            else _pred_cap(cfg, op, b_eff, N),
                            simplex_feasible=feasible.kind == "simplex")

    comp_feasible = _comparator_feasible(cfg, reg)
    comparator, comp_values = _comparators(rounds, N, dim, comp_feasible)
    comp_cum = np.cumsum([loss_value(r.loss, comparator.data[r.active_task])
                          for r in rounds])

    oracle_eta = None
    if cfg.tuning == "oracle":
        best = None
        for eta in cfg.eta_grid:
            lc = LearnerConfig(reg, op, feasible, constant_rate(eta), vspec, lipschitz=L)
            res = _single_pass(cfg, lc, dim, rounds)
            final = float(res.cum_loss[-1] - comp_cum[-1])
            if best is None or final < best[0]:
                best = (final, eta, res)
        _, oracle_eta, res = best
        sched, bound = constant_rate(oracle_eta), None
    else:
        if cfg.tuning == "fixed":
            sched = constant_rate(cfg.eta)
        elif cfg.tuning == "adaptive":
            sched = adaptive_schedule()
        else:
            sched = _theory_schedule(cfg, reg, op, b_eff, N, dim, T, L)
        lc = LearnerConfig(reg, op, feasible, sched, vspec, lipschitz=L)
        res = _single_pass(cfg, lc, dim, rounds)
        bound = _bound_curve(cfg, reg, op, b_eff, N, dim, T, L, sched, res.gsq_cum)

    regret = res.cum_loss - comp_cum
    measured = vspec.measure(comparator)
    return RegretReport(
        config=cfg, horizon=T, n_tasks=N, dim=dim, b=b_eff,
        eta=sched.eta, oracle_eta=oracle_eta, lipschitz=L,
        cumulative_loss=res.cum_loss, regret=regret, bound=bound,
        comparator=comparator, comparator_values=comp_values,
        comparator_total=float(comp_values.sum()),
        variance_measured=measured, variance_threshold=vspec.threshold(),
        comparator_in_set=measured <= vspec.threshold() + 1e-12,
        realized_grad_bound=res.grad_max, grad_sq_sum=float(res.gsq_cum[-1]),
        clamped_rounds=res.clamped, seed=cfg.seed,
        wall_clock=time.perf_counter() - start,
    )


# ---------------------------------------------------------------------------
# sweeps

def sweep(cfg: RunConfig) -> list[dict]:
    """Cartesian product over the configured grids; repetitions shift the
    seed and are summarized by mean and sample std of the final regret."""
    b_axis = cfg.b_grid if cfg.b_grid else [cfg.b]
    sigma_axis = cfg.sigma_grid if cfg.sigma_grid else [cfg.sigma]
    n_axis = cfg.n_tasks_grid if cfg.n_tasks_grid else [cfg.n_tasks]
    eta_axis = cfg.eta_grid if (cfg.eta_grid and cfg.tuning == "fixed") else [cfg.eta]

    rows = []
    for b, sigma, n_tasks, eta in itertools.product(b_axis, sigma_axis, n_axis, eta_axis):
        finals, bounds = [], []
        for r in range(cfg.repetitions):
            cell = replace(cfg, b=b, sigma=sigma, n_tasks=int(n_tasks), eta=eta,
                           seed=cfg.seed + r, b_grid=None, sigma_grid=None,
                           n_tasks_grid=None,
                           eta_grid=cfg.eta_grid if cfg.tuning == "oracle" else None)
            report = run_experiment(cell)
            finals.append(report.final_regret)
            if report.bound is not None:
                bounds.append(float(report.bound[-1]))
        finals = np.asarray(finals)
        rows.append({
            "b": b, "sigma": sigma, "n_tasks": int(n_tasks), "eta": eta,
            "repetitions": cfg.repetitions,
            "mean_final_regret": float(finals.mean()),
            "std_final_regret": float(finals.std(ddof=1)) if len(finals) > 1 else 0.0,
            "mean_final_bound": float(np.mean(bounds)) if bounds else None,
        })
    return rows


# ---------------------------------------------------------------------------
# reports

def _fmt(x: float) -> str:
    return f"{x:.17g}"


def emit_report(report: RegretReport, path: str) -> str:
    """Write the trajectory CSV plus a .meta.json sidecar; returns the
    sidecar path.  The CSV is byte-deterministic for a fixed config; wall
    clock and version land in the sidecar only."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("t,cumulative_loss,regret,bound\n")
        for t in range(report.horizon):
            b = _fmt(report.bound[t]) if report.bound is not None else ""
            fh.write(f"{t + 1},{_fmt(report.cumulative_loss[t])},"
                     f"{_fmt(report.regret[t])},{b}\n")

    from . import __version__

    meta = {
        "config": asdict(report.config),
        "version": __version__,
        "seed": report.seed,
        "horizon": report.horizon,
        "n_tasks": report.n_tasks,
        "dim": report.dim,
        "b": report.b,
        "eta": report.eta,
        "oracle_eta": report.oracle_eta,
        "lipschitz": report.lipschitz,
        "realized_grad_bound": report.realized_grad_bound,
        "grad_sq_sum": report.grad_sq_sum,
        "clamped_rounds": report.clamped_rounds,
        "final_cumulative_loss": float(report.cumulative_loss[-1]),
        "final_regret": report.final_regret,
        "final_bound": float(report.bound[-1]) if report.bound is not None else None,
        "comparator_values": [float(v) for v in report.comparator_values],
        "comparator_total": report.comparator_total,
        "variance_measured": report.variance_measured,
        "variance_threshold": report.variance_threshold,
        "comparator_in_set": report.comparator_in_set,
        "wall_clock_s": report.wall_clock,
    }
    meta_path = (path[:-4] if path.endswith(".csv") else path) + ".meta.json"
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return meta_path
