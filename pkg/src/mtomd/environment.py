"""Adversarial environments: losses with subgradients, activation
schedules, controlled-dispersion synthetic streams, a worst-case stream
family, CSV ingestion, and the exact batch comparator used as the regret
oracle.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .compound import CompoundVector, as_matrix
from .geometry import NormTag, check_simplex, norm
from .learners import FeasibleSet, _pgd
from .variance import norm_variance

LOGWEALTH_CLAMP = 1e-12
COMPARATOR_TOL = 1e-8
COMPARATOR_CAP = 100_000


# ---------------------------------------------------------------------------
# losses

LOSS_KINDS = ("square", "logistic", "logwealth", "linear")


@dataclass(frozen=True)
class LossInstance:
    """One adversarial loss: kind plus its data.

    square     (w.x - y)^2
    logistic   ln(1 + exp(-y * w.x)),  y in {-1, +1}
    logwealth  -ln(w.x), features are strictly positive price relatives
    linear     g.w with g = features (label unused)
    """

    kind: str
    features: np.ndarray
    label: float = 0.0

    def __post_init__(self):
        if self.kind not in LOSS_KINDS:
            raise ValueError(f"unknown loss kind {self.kind!r}")
        x = np.asarray(self.features, dtype=float)
        object.__setattr__(self, "features", x)
        if self.kind == "logwealth" and (x <= 0).any():
            raise ValueError("logwealth features (price relatives) must be strictly positive")
        if self.kind == "logistic" and self.label not in (-1.0, 1.0):
            raise ValueError(f"logistic label must be -1 or +1, got {self.label}")


def loss_value(inst: LossInstance, w: np.ndarray) -> float:
    w = np.asarray(w, dtype=float)
    z = float(inst.features @ w)
    if inst.kind == "square":
        return (z - inst.label) ** 2
    if inst.kind == "logistic":
        return float(np.logaddexp(0.0, -inst.label * z))
    if inst.kind == "logwealth":
        return -math.log(max(z, LOGWEALTH_CLAMP))
    return z


def loss_subgradient(inst: LossInstance, w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    x = inst.features
    z = float(x @ w)
    if inst.kind == "square":
        return 2.0 * (z - inst.label) * x
    if inst.kind == "logistic":
        # sigmoid(-y*z), exponentiating only nonpositive arguments
        m = -inst.label * z
        if m >= 0:
            s = 1.0 / (1.0 + math.exp(-m))
        else:
            em = math.exp(m)
            s = em / (1.0 + em)
        return -inst.label * s * x
    if inst.kind == "logwealth":
        return -x / max(z, LOGWEALTH_CLAMP)
    return x.copy()


def logwealth_clamped(inst: LossInstance, w: np.ndarray) -> bool:
    """True when the log-wealth argument had to be clamped at this point."""
    return inst.kind == "logwealth" and float(inst.features @ np.asarray(w)) <= LOGWEALTH_CLAMP


@dataclass(frozen=True)
class Round:
    t: int
    active_task: int
    loss: LossInstance


# ---------------------------------------------------------------------------
# schedules

@dataclass(frozen=True)
class ScheduleSpec:
    kind: str                  # "round_robin" | "uniform_random" | "blocked" | "from_data"
    seed: int | None = None
    block_len: int = 1

    def __post_init__(self):
        if self.kind not in ("round_robin", "uniform_random", "blocked", "from_data"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.block_len < 1:
            raise ValueError("block_len must be >= 1")


def make_schedule(spec: ScheduleSpec, T: int, N: int) -> np.ndarray:
    if T < 1 or N < 1:
        raise ValueError("T and N must be >= 1")
    t = np.arange(T)
    if spec.kind == "round_robin":
        return t % N
    if spec.kind == "blocked":
        return (t // spec.block_len) % N
    if spec.kind == "uniform_random":
        rng = np.random.default_rng(spec.seed)
        return rng.integers(0, N, size=T)
    raise ValueError("from_data schedules come with the data, not from make_schedule")


# ---------------------------------------------------------------------------
# synthetic streams

@dataclass(frozen=True)
class SyntheticTaskSpec:
    """Controlled-dispersion regression tasks.

    The task vectors are u_i = u0 + delta_i with the deltas mean-centered
    and rescaled so that the l2 variance of the compound comparator equals
    spread^2 exactly.  With max_block_norm set, draws violating the block
    norm cap are rejected and resampled.
    """

    n_tasks: int
    dim: int
    center_norm: float = 0.5
    spread: float = 0.0
    noise_std: float = 0.0
    seed: int = 0
    max_block_norm: float | None = None

    def __post_init__(self):
        if self.n_tasks < 1 or self.dim < 1:
            raise ValueError("n_tasks and dim must be >= 1")
        if min(self.center_norm, self.spread, self.noise_std) < 0:
            raise ValueError("center_norm, spread, noise_std must be nonnegative")


def _draw_task_vectors(spec: SyntheticTaskSpec, rng: np.random.Generator) -> np.ndarray:
    N, d = spec.n_tasks, spec.dim
    direction = rng.normal(size=d)
    direction /= max(np.linalg.norm(direction), 1e-30)
    u0 = spec.center_norm * direction
    if N == 1 or spec.spread == 0.0:
        return np.tile(u0, (N, 1))
    for _ in range(200):
        zeta = rng.normal(size=(N, d))
        zeta -= zeta.mean(axis=0)
        v = float((zeta ** 2).sum() / (N - 1))
        if v <= 0:
            continue
        U = u0 + zeta * (spec.spread / math.sqrt(v))
        if spec.max_block_norm is None or np.linalg.norm(U, axis=1).max() <= spec.max_block_norm:
            return U
    raise ValueError("could not satisfy max_block_norm after 200 resamples; "
                     "loosen center_norm/spread")


def make_synthetic(spec: SyntheticTaskSpec, T: int,
                   schedule: ScheduleSpec) -> tuple[list[Round], CompoundVector]:
    """Square-loss stream y_t = u_{i_t}.x_t + noise with unit-norm features."""
    rng = np.random.default_rng(spec.seed)
    U = _draw_task_vectors(spec, rng)
    if spec.spread > 0 and spec.n_tasks > 1:
        achieved = norm_variance(U)
        if abs(achieved - spec.spread ** 2) > 0.02 * spec.spread ** 2:
            raise AssertionError(f"variance off target: {achieved} vs {spec.spread ** 2}")
    order = make_schedule(schedule, T, spec.n_tasks)
    rounds = []
    for t in range(T):
        x = rng.normal(size=spec.dim)
        x /= max(np.linalg.norm(x), 1e-30)
        i = int(order[t])
        y = float(U[i] @ x)
        if spec.noise_std > 0:
            y += spec.noise_std * rng.normal()
        rounds.append(Round(t, i, LossInstance("square", x, y)))
    return rounds, CompoundVector(U)


@dataclass(frozen=True)
class SimplexTaskSpec:
    """Simplex-valued tasks with a controlled coordinatewise relative range."""

    n_tasks: int
    dim: int
    target_range_var: float = 0.0    # requested simplex variance, hit from below
    noise_std: float = 0.0
    seed: int = 0
    min_entry: float = 1e-3

    def __post_init__(self):
        if self.n_tasks < 1 or self.dim < 2:
            raise ValueError("need n_tasks >= 1 and dim >= 2")
        if not 0.0 <= self.target_range_var < 1.0:
            raise ValueError("target_range_var must lie in [0, 1)")


def _simplex_task_vectors(spec: SimplexTaskSpec, rng: np.random.Generator) -> np.ndarray:
    from .variance import simplex_variance

    N, d = spec.n_tasks, spec.dim
    u0 = rng.dirichlet(5.0 * np.ones(d))
    u0 = 0.5 * u0 + 0.5 / d          # keep the center well inside
    if spec.target_range_var == 0.0 or N == 1:
        return np.tile(u0, (N, 1))
    delta = rng.normal(size=(N, d))
    delta -= delta.mean(axis=1, keepdims=True)   # stay on the simplex affine hull
    delta -= delta.mean(axis=0)                  # zero mean across tasks
    s_max = 1.0
    while (u0 + s_max * delta).min() > spec.min_entry and s_max < 1e6:
        s_max *= 2.0
    lo, hi = 0.0, s_max
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        U = u0 + mid * delta
        if U.min() <= spec.min_entry or simplex_variance(U) > spec.target_range_var:
            hi = mid
        else:
            lo = mid
    return u0 + lo * delta


def make_synthetic_simplex(spec: SimplexTaskSpec, T: int,
                           schedule: ScheduleSpec) -> tuple[list[Round], CompoundVector]:
    """Square-loss stream whose per-task optima lie on the simplex."""
    rng = np.random.default_rng(spec.seed)
    U = _simplex_task_vectors(spec, rng)
    for k in range(spec.n_tasks):
        check_simplex(U[k], f"task {k}")
    order = make_schedule(schedule, T, spec.n_tasks)
    rounds = []
    for t in range(T):
        x = rng.uniform(0.2, 1.0, size=spec.dim)
        i = int(order[t])
        y = float(U[i] @ x)
        if spec.noise_std > 0:
            y += spec.noise_std * rng.normal()
        rounds.append(Round(t, i, LossInstance("square", x, y)))
    return rounds, CompoundVector(U)


# ---------------------------------------------------------------------------
# worst-case construction

def make_lower_bound_instance(d: int, sigma: float) -> CompoundVector:
    """Hard comparator family: N = 2d blocks u0 -/+ s'*e_i with
    ||u0||^2 = 1 - sigma^2 and s' = sigma*sqrt((N-1)/N), so the l2 variance
    is exactly sigma^2.

    The block-norm floor ||u_i||^2 >= 1 - 2*sigma^2 cannot hold for every
    admissible (d, sigma): u0 has some coordinate of size at least
    ||u0||/sqrt(d), which for sigma^2 < 1/(d+1) drags one block below the
    floor no matter how u0 is rotated.  The floor is therefore verified
    exactly when the equal-spread construction attains it.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    if not 0.0 < sigma < 1.0 / math.sqrt(2.0):
        raise ValueError(f"sigma must lie in (0, 1/sqrt(2)), got {sigma}")
    N = 2 * d
    u0 = math.sqrt(1.0 - sigma ** 2) / math.sqrt(d) * np.ones(d)
    sp = sigma * math.sqrt((N - 1) / N)
    blocks = np.empty((N, d))
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        blocks[2 * i] = u0 - sp * e
        blocks[2 * i + 1] = u0 + sp * e
    U = CompoundVector(blocks)
    var = norm_variance(U)
    if abs(var - sigma ** 2) > 1e-10:
        raise AssertionError(f"construction variance {var} != sigma^2 {sigma ** 2}")
    min_sq = float((blocks ** 2).sum(axis=1).min())
    floor = 1.0 - 2.0 * sigma ** 2
    attainable = 2.0 * sp * np.abs(u0).max() <= sigma ** 2 * (2.0 - 1.0 / N)
    if attainable and min_sq < floor - 1e-12:
        raise AssertionError(f"block norm floor violated: {min_sq} < {floor}")
    return U


def make_lower_bound_rounds(U: CompoundVector, rounds_per_task: int) -> list[Round]:
    """Linear-loss stream realizing the worst case for independent learners:
    round-robin over tasks, each task alternating +/- unit gradients along
    its own comparator direction, sign-balanced so the per-task optimum
    value is zero."""
    if rounds_per_task % 2 != 0:
        raise ValueError("rounds_per_task must be even for sign balance")
    N = U.n_tasks
    dirs = U.data / np.linalg.norm(U.data, axis=1, keepdims=True)
    rounds = []
    visits = np.zeros(N, dtype=int)
    for t in range(N * rounds_per_task):
        i = t % N
        sign = 1.0 if visits[i] % 2 == 0 else -1.0
        visits[i] += 1
        rounds.append(Round(t, i, LossInstance("linear", sign * dirs[i])))
    return rounds


# ---------------------------------------------------------------------------
# CSV ingestion

def load_csv(path: str, task_col: str, feature_cols: list[str],
             label_col: str | None = None, loss_kind: str = "square") -> tuple[list[Round], int]:
    """Read rounds from a CSV file in file order (from-data schedule).

    The header row is required; task identifiers are remapped densely to
    0..N-1 in order of first appearance.  Returns (rounds, n_tasks).
    """
    rounds: list[Round] = []
    task_ids: dict[str, int] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValueError(f"{path}: no header row")
        missing = [c for c in [task_col, *feature_cols] + ([label_col] if label_col else [])
                   if c not in reader.fieldnames]
        if missing:
            raise ValueError(f"{path}: unknown column(s) {missing}; header has {reader.fieldnames}")
        for lineno, row in enumerate(reader, start=2):
            try:
                feats = np.array([float(row[c]) for c in feature_cols])
                label = float(row[label_col]) if label_col else 0.0
            except (TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: malformed row ({exc})") from None
            key = row[task_col]
            if key is None:
                raise ValueError(f"{path}:{lineno}: missing task column")
            task = task_ids.setdefault(key, len(task_ids))
            rounds.append(Round(len(rounds), task, LossInstance(loss_kind, feats, label)))
    if not rounds:
        raise ValueError(f"{path}: no rounds")
    return rounds, len(task_ids)


# ---------------------------------------------------------------------------
# batch comparator (the regret oracle)

def _stack(rounds: list[Round]) -> tuple[str, np.ndarray, np.ndarray]:
    kinds = {r.loss.kind for r in rounds}
    if len(kinds) != 1:
        raise ValueError(f"mixed loss kinds in one comparator problem: {sorted(kinds)}")
    X = np.vstack([r.loss.features for r in rounds])
    y = np.array([r.loss.label for r in rounds])
    return kinds.pop(), X, y


def batch_comparator(rounds: list[Round], feasible: FeasibleSet,
                     tol: float = COMPARATOR_TOL, cap: int = COMPARATOR_CAP
                     ) -> tuple[np.ndarray, float]:
    """Best fixed feasible point in hindsight for one task's rounds."""
    if not rounds:
        raise ValueError("batch_comparator needs at least one round")
    kind, X, y = _stack(rounds)
    d = X.shape[1]

    if kind == "square":
        def fval(w):
            r = X @ w - y
            return float(r @ r)

        def fgrad(w):
            return 2.0 * (X.T @ (X @ w - y))
    elif kind == "logistic":
        def fval(w):
            return float(np.logaddexp(0.0, -y * (X @ w)).sum())

        def fgrad(w):
            z = -y * (X @ w)
            s = np.where(z < 0, np.exp(z) / (1 + np.exp(np.minimum(z, 0))),
                         1.0 / (1.0 + np.exp(-z)))
            return X.T @ (-y * s)
    elif kind == "logwealth":
        def fval(w):
            r = np.maximum(X @ w, LOGWEALTH_CLAMP)
            return float(-np.log(r).sum())

        def fgrad(w):
            r = np.maximum(X @ w, LOGWEALTH_CLAMP)
            return -(X.T @ (1.0 / r))
    else:
        gsum = X.sum(axis=0)

        def fval(w):
            return float(gsum @ w)

        def fgrad(w):
            return gsum.copy()

    w0 = np.full(d, 1.0 / d) if feasible.kind == "simplex" else np.zeros(d)
    w = _pgd(w0, fval, fgrad, feasible.project_block, tol=tol, cap=cap)
    return w, fval(w)


# ---------------------------------------------------------------------------
# Lipschitz bounds for tuning

def lipschitz_bound(rounds: list[Round], dual_tag: NormTag,
                    pred_norm_cap: float | None = None,
                    simplex_feasible: bool = False) -> float:
    """A-priori bound on the dual norm of any subgradient met on the stream.

    For square losses the prediction magnitude matters: on norm-ball
    feasible sets pass the l2 cap on iterates; simplex-feasible runs bound
    the prediction by the feature maximum instead.
    """
    worst = 0.0
    for r in rounds:
        x = r.loss.features
        nx = norm(x, dual_tag)
        if r.loss.kind == "square":
            if simplex_feasible:
                pred = float(np.abs(x).max())
            elif pred_norm_cap is not None:
                pred = pred_norm_cap * float(np.linalg.norm(x))
            else:
                raise ValueError("square losses need pred_norm_cap on norm-ball sets")
            worst = max(worst, 2.0 * (pred + abs(r.loss.label)) * nx)
        elif r.loss.kind == "logistic":
            worst = max(worst, nx)
        elif r.loss.kind == "logwealth":
            worst = max(worst, nx / float(x.min()))
        else:
            worst = max(worst, nx)
    if worst <= 0:
        worst = 1.0
    return worst
