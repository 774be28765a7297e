"""Online learners: multitask OGD and EG closed forms, a generic
mirror-descent fallback, independent per-task baselines, learning-rate
schedules, and feasible-set projections.

The multitask learners keep their state in transformed coordinates
y = (A^{1/2} kron I_d) x, where the shared update has a closed form:

  OGD:  y' = Proj_ball( y - eta * (A^{-1/2} gbar) ),  radius sqrt((1+b*sigma^2)*N)*D
  EG:   y'_{k,j}  proportional to  y_{k,j} * exp(-eta * A^{-1/2}_{k,i} * g_j),
        renormalized per block

with gbar the compound gradient that is g in the active block i and zero
elsewhere.  Predictions map back through one row of A^{-1/2}, so a round
costs O(N d).  The generic learner instead solves the proximal problem

  argmin_{x in feasible}  eta*<gbar, x> + B_psibar(A^{1/2} x, A^{1/2} x_t)

with a projected-gradient inner solver; it is the only route for p-norm
regularizers, where no closed form exists, and doubles as an oracle for
the closed forms in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .compound import CompoundVector, as_matrix
from .geometry import (L2, ENTROPY_CLAMP, NormTag, Regularizer, check_simplex,
                       lp, mirror_grad, norm)
from .interaction import InteractionOperator
from .variance import VarianceSpec

ADAPTIVE_SENTINEL = 1e300
INNER_TOL = 1e-8
INNER_CAP = 10_000


# ---------------------------------------------------------------------------
# feasible sets and projections

def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    idx = np.arange(1, v.size + 1)
    rho = np.nonzero(u * idx > (css - 1.0))[0][-1]
    theta = (css[rho] - 1.0) / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def project_ball_l2(v: np.ndarray, radius: float) -> np.ndarray:
    nrm = float(np.linalg.norm(v))
    if nrm <= radius:
        return np.asarray(v, dtype=float)
    return v * (radius / nrm)


def project_ball_l1(v: np.ndarray, radius: float) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if np.abs(v).sum() <= radius:
        return v
    w = project_simplex(np.abs(v) / radius) * radius
    return np.sign(v) * w


def project_ball_linf(v: np.ndarray, radius: float) -> np.ndarray:
    return np.clip(v, -radius, radius)


def project_ball_lp(v: np.ndarray, p: float, radius: float) -> np.ndarray:
    """Euclidean projection onto the lp ball via KKT bisection (1 < p < 2).

    At the optimum w + mu*p*w^(p-1) = |v| coordinatewise with w >= 0 and
    ||w||_p = radius; w(mu) is found by inner bisection, mu by outer.
    """
    v = np.asarray(v, dtype=float)
    a = np.abs(v)
    if float(np.sum(a ** p) ** (1.0 / p)) <= radius:
        return v

    def w_of(mu: float) -> np.ndarray:
        lo = np.zeros_like(a)
        hi = a.copy()
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            over = mid + mu * p * mid ** (p - 1.0) > a
            hi = np.where(over, mid, hi)
            lo = np.where(over, lo, mid)
        return 0.5 * (lo + hi)

    mu_hi = 1.0
    for _ in range(200):
        if float(np.sum(w_of(mu_hi) ** p) ** (1.0 / p)) <= radius:
            break
        mu_hi *= 2.0
    mu_lo = 0.0
    for _ in range(100):
        mu = 0.5 * (mu_lo + mu_hi)
        if float(np.sum(w_of(mu) ** p) ** (1.0 / p)) > radius:
            mu_lo = mu
        else:
            mu_hi = mu
    return np.sign(v) * w_of(mu_hi)


@dataclass(frozen=True)
class FeasibleSet:
    """Constraint set: per-block norm ball, per-block simplex, or the
    compound Mahalanobis ball {||x||_A <= radius} handled in y-space."""

    kind: str                    # "norm_ball" | "simplex" | "mahalanobis"
    radius: float = 1.0
    norm_tag: NormTag = L2

    def __post_init__(self):
        if self.kind not in ("norm_ball", "simplex", "mahalanobis"):
            raise ValueError(f"unknown feasible kind {self.kind!r}")
        if self.radius <= 0:
            raise ValueError(f"radius must be positive, got {self.radius}")

    def project_block(self, v: np.ndarray) -> np.ndarray:
        if self.kind == "simplex":
            return project_simplex(v)
        if self.kind != "norm_ball":
            raise ValueError("mahalanobis ball has no per-block projection")
        t = self.norm_tag
        if t.kind == "l2" or (t.kind == "lp" and t.p == 2.0):
            return project_ball_l2(v, self.radius)
        if t.kind == "l1":
            return project_ball_l1(v, self.radius)
        if t.kind == "linf":
            return project_ball_linf(v, self.radius)
        return project_ball_lp(v, t.p, self.radius)

    def project_blocks(self, X: np.ndarray) -> np.ndarray:
        return np.vstack([self.project_block(X[i]) for i in range(X.shape[0])])


def norm_ball(tag: NormTag, radius: float) -> FeasibleSet:
    return FeasibleSet("norm_ball", radius, tag)


def simplex_set() -> FeasibleSet:
    return FeasibleSet("simplex")


def mahalanobis_ball(radius: float) -> FeasibleSet:
    return FeasibleSet("mahalanobis", radius)


def mahalanobis_radius(b: float, sigma: float, n_tasks: int, diameter: float) -> float:
    """Radius of the compound constraint ||x||_A <= sqrt((1+b*sigma^2)*N)*D."""
    return math.sqrt((1.0 + b * sigma ** 2) * n_tasks) * diameter


# ---------------------------------------------------------------------------
# learning rates

@dataclass
class RateSchedule:
    """Learning-rate policy.  Theory kinds are resolved to a fixed eta by
    resolve_rate; the adaptive kind accumulates squared dual gradients."""

    kind: str                      # constant | adaptive | theory_ogd | theory_pnorm | theory_eg
    eta: float | None = None
    scale: float | None = None     # adaptive numerator override
    accumulated_sq_dual_grad: float = field(default=0.0)

    def __post_init__(self):
        if self.kind not in ("constant", "adaptive", "theory_ogd", "theory_pnorm", "theory_eg"):
            raise ValueError(f"unknown rate kind {self.kind!r}")
        if self.kind == "constant" and (self.eta is None or self.eta <= 0):
            raise ValueError("constant schedule requires eta > 0")


def constant_rate(eta: float) -> RateSchedule:
    return RateSchedule("constant", eta=float(eta))


def adaptive_schedule(scale: float | None = None) -> RateSchedule:
    return RateSchedule("adaptive", scale=scale)


def theory_rate_ogd(D: float, L: float, N: int, sigma: float, T: int, b: float) -> float:
    """Tuned Euclidean rate; at b = N it equals the headline
    D*sqrt(N(N+1)(1+(N-1)sigma^2)) / (L*sqrt(2T)), and at b = 0, sigma = 0
    it reduces to the independent tuning D*sqrt(N)/(L*sqrt(T))."""
    if min(D, L, N, T) <= 0 or not 0.0 <= sigma <= 1.0 or b < 0:
        raise ValueError("theory_rate_ogd requires positive D, L, N, T, b >= 0, sigma in [0,1]")
    return (N * D / L) * math.sqrt(
        (1.0 + b * (N - 1) * sigma ** 2 / N) * (1.0 + b) / ((b + N) * T))


def theory_rate_pnorm(D: float, L: float, N: int, sigma: float, T: int, b: float,
                      lam: float) -> float:
    """General-norm analog: the Euclidean proof-form rate picks up a factor
    2*sqrt(lam) from the quadrupled Bregman-diameter bound and the strong
    convexity constant of the p-norm regularizer."""
    return 2.0 * math.sqrt(lam) * theory_rate_ogd(D, L, N, sigma, T, b)


def theory_rate_eg(N: int, L: float, C: float, lam: float, b: float, T: int) -> float:
    """Tuned entropic rate N*sqrt(2*lam*(1+b)*C) / (L*sqrt((b+N)*T))."""
    if min(N, L, C, lam, T) <= 0 or b < 0:
        raise ValueError("theory_rate_eg requires positive N, L, C, lam, T and b >= 0")
    return N * math.sqrt(2.0 * lam * (1.0 + b) * C) / (L * math.sqrt((b + N) * T))


def adaptive_scale(D: float, N: int, sigma: float) -> float:
    return D * math.sqrt(N * (N + 1) * (1.0 + (N - 1) * sigma ** 2))


def adaptive_rate(schedule: RateSchedule, new_dual_grad_sq: float, D: float, N: int,
                  sigma: float) -> float:
    """Accumulate the squared dual gradient of the current round, then return
    eta_t = D*sqrt(N(N+1)(1+(N-1)sigma^2)) / sqrt(sum of accumulated squares).
    A zero accumulator (zero-gradient prefix) yields a large sentinel; the
    learners skip zero-gradient steps outright, so it is never applied."""
    schedule.accumulated_sq_dual_grad += float(new_dual_grad_sq)
    if schedule.accumulated_sq_dual_grad <= 0.0:
        return ADAPTIVE_SENTINEL
    scale = schedule.scale if schedule.scale is not None else adaptive_scale(D, N, sigma)
    return scale / math.sqrt(schedule.accumulated_sq_dual_grad)


def p_star_norm_choice(d: int) -> float:
    """Exponent 2*ln(d)/(2*ln(d)-1), the simplex-friendly p-norm choice."""
    if d < 3:
        raise ValueError(f"p-star choice requires d >= 3, got {d}")
    return 2.0 * math.log(d) / (2.0 * math.log(d) - 1.0)


def resolve_rate(schedule: RateSchedule, *, regularizer: Regularizer, D: float,
                 L: float | None, N: int, sigma: float, T: int, b: float,
                 dim: int) -> RateSchedule:
    """Fill in the concrete eta (or adaptive scale) of a schedule."""
    if schedule.kind == "constant":
        return replace(schedule)
    if schedule.kind == "adaptive":
        scale = schedule.scale if schedule.scale is not None else adaptive_scale(D, N, sigma)
        return RateSchedule("adaptive", scale=scale)
    if L is None or L <= 0:
        raise ValueError("theory rate schedules need a positive Lipschitz bound L")
    if schedule.kind == "theory_ogd":
        eta = theory_rate_ogd(D, L, N, sigma, T, b)
    elif schedule.kind == "theory_pnorm":
        eta = theory_rate_pnorm(D, L, N, sigma, T, b, regularizer.lam)
    else:
        eta = theory_rate_eg(N, L, math.log(dim), regularizer.lam, b, T)
    return RateSchedule(schedule.kind, eta=eta)


# ---------------------------------------------------------------------------
# theoretical bounds

def theory_bound(kind: str, *, D: float | None = None, L: float | None = None,
                 n_tasks: int | None = None, sigma: float | None = None,
                 horizon: int | None = None, grad_sq_sum: float | None = None,
                 smoothness: float | None = None, comparator_loss: float | None = None,
                 breg_diameter: float | None = None, lam: float = 1.0) -> float:
    """Right-hand side of the tuned regret guarantees.

    kind: "ogd" (Euclidean, constant rate), "norm" (general norm),
    "adaptive" (realized-gradient rate), "smooth" (smooth losses, uses the
    realized comparator loss), "eg" (entropic; breg_diameter = ln d).
    """
    def need(**kw):
        for name, val in kw.items():
            if val is None:
                raise ValueError(f"theory_bound({kind!r}) requires {name}")

    need(n_tasks=n_tasks, sigma=sigma)
    acc = math.sqrt(1.0 + sigma ** 2 * (n_tasks - 1))
    if kind == "ogd":
        need(D=D, L=L, horizon=horizon)
        return D * L * acc * math.sqrt(2.0 * horizon)
    if kind == "norm":
        need(D=D, L=L, horizon=horizon)
        return D * L * acc * math.sqrt(8.0 * horizon)
    if kind == "adaptive":
        need(D=D, grad_sq_sum=grad_sq_sum)
        return 8.0 * D * acc * math.sqrt(grad_sq_sum)
    if kind == "smooth":
        need(D=D, smoothness=smoothness, comparator_loss=comparator_loss)
        return 16.0 * D * acc * (2.0 * smoothness * D * acc
                                 + math.sqrt(smoothness * max(comparator_loss, 0.0)))
    if kind == "eg":
        need(L=L, horizon=horizon, breg_diameter=breg_diameter)
        return L * acc * math.sqrt(2.0 * breg_diameter * horizon / lam)
    raise ValueError(f"unknown bound kind {kind!r}")


# ---------------------------------------------------------------------------
# learner configuration

@dataclass
class LearnerConfig:
    regularizer: Regularizer
    operator: InteractionOperator
    feasible: FeasibleSet
    rate: RateSchedule
    variance: VarianceSpec
    lipschitz: float | None = None

    def __post_init__(self):
        simplex_feasible = self.feasible.kind == "simplex"
        simplex_reg = self.regularizer.domain == "simplex"
        if simplex_reg != simplex_feasible:
            raise ValueError("simplex feasible set and entropic regularizer go together")
        if self.lipschitz is not None and self.lipschitz <= 0:
            raise ValueError("lipschitz bound must be positive")


def _dual_sq(reg: Regularizer, g: np.ndarray) -> float:
    return norm(g, reg.dual_norm) ** 2


class _RatedLearner:
    """Shared rate plumbing: concrete eta lookup per step."""

    config: LearnerConfig

    def _eta(self, g: np.ndarray) -> float:
        sched = self.config.rate
        if sched.kind == "adaptive":
            spec = self.config.variance
            return adaptive_rate(sched, _dual_sq(self.config.regularizer, g),
                                 spec.diameter, self.config.operator.n_tasks, spec.sigma)
        if sched.eta is None:
            raise ValueError(f"rate schedule {sched.kind!r} not resolved; call resolve_rate")
        return sched.eta


# ---------------------------------------------------------------------------
# closed-form multitask learners

class MultitaskOGD(_RatedLearner):
    """Euclidean shared-update learner in transformed coordinates."""

    def __init__(self, config: LearnerConfig, dim: int, x1=None):
        if config.regularizer.kind != "euclidean":
            raise ValueError("MultitaskOGD requires the euclidean regularizer")
        if config.feasible.kind != "mahalanobis":
            raise ValueError("MultitaskOGD projects onto the Mahalanobis ball")
        self.config = config
        self.dim = dim
        N = config.operator.n_tasks
        if x1 is None:
            self.y = np.zeros((N, dim))
        else:
            self.y = (config.operator.sqrt @ as_matrix(x1)).copy()
            self._project()
        self.t = 0

    @property
    def n_tasks(self) -> int:
        return self.config.operator.n_tasks

    def _project(self) -> None:
        r = self.config.feasible.radius
        nrm = float(np.sqrt((self.y ** 2).sum()))
        if nrm > r:
            self.y *= r / nrm

    def predict(self, i_t: int) -> np.ndarray:
        return self.config.operator.inv_sqrt[i_t] @ self.y

    def step(self, i_t: int, g: np.ndarray) -> None:
        g = np.asarray(g, dtype=float)
        self.t += 1
        if not g.any():
            return
        eta = self._eta(g)
        self.y -= eta * np.outer(self.config.operator.inv_sqrt[:, i_t], g)
        self._project()

    def iterate(self) -> CompoundVector:
        return CompoundVector(self.config.operator.inv_sqrt @ self.y)


def _eg_block_update(block: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Multiplicative update block * exp(z), renormalized; exact under the
    per-block shift that guards exp overflow."""
    w = block * np.exp(z - z.max())
    total = w.sum()
    if total <= 0.0:
        # all mass underflowed; restart from the shifted weights alone
        w = np.exp(z - z.max())
        total = w.sum()
    w /= total
    return np.maximum(w, ENTROPY_CLAMP)


class MultitaskEG(_RatedLearner):
    """Entropic shared-update learner; every task block lives on the simplex."""

    def __init__(self, config: LearnerConfig, dim: int, x1=None):
        if config.regularizer.kind != "negentropy":
            raise ValueError("MultitaskEG requires the negentropy regularizer")
        self.config = config
        self.dim = dim
        N = config.operator.n_tasks
        if x1 is None:
            self.y = np.full((N, dim), 1.0 / dim)
        else:
            Y = as_matrix(x1).copy()
            for k in range(N):
                check_simplex(Y[k], f"x1 block {k}")
            self.y = Y
        self.t = 0

    @property
    def n_tasks(self) -> int:
        return self.config.operator.n_tasks

    def predict(self, i_t: int) -> np.ndarray:
        return self.config.operator.inv_sqrt[i_t] @ self.y

    def step(self, i_t: int, g: np.ndarray) -> None:
        g = np.asarray(g, dtype=float)
        self.t += 1
        if not g.any():
            return
        eta = self._eta(g)
        coeffs = self.config.operator.inv_sqrt[:, i_t]
        for k in np.flatnonzero(coeffs != 0.0):
            self.y[k] = _eg_block_update(self.y[k], -eta * coeffs[k] * g)

    def iterate(self) -> CompoundVector:
        return CompoundVector(self.config.operator.inv_sqrt @ self.y)


# ---------------------------------------------------------------------------
# independent baselines

class IndependentOGD(_RatedLearner):
    """N uncoupled projected-OGD learners, each on its own norm ball."""

    def __init__(self, config: LearnerConfig, dim: int, x1=None):
        if config.regularizer.kind != "euclidean":
            raise ValueError("IndependentOGD requires the euclidean regularizer")
        if config.feasible.kind != "norm_ball":
            raise ValueError("IndependentOGD projects each task onto a norm ball")
        self.config = config
        self.dim = dim
        N = config.operator.n_tasks
        self.x = np.zeros((N, dim)) if x1 is None else config.feasible.project_blocks(as_matrix(x1))
        self.t = 0

    @property
    def n_tasks(self) -> int:
        return self.config.operator.n_tasks

    def predict(self, i_t: int) -> np.ndarray:
        return self.x[i_t].copy()

    def step(self, i_t: int, g: np.ndarray) -> None:
        g = np.asarray(g, dtype=float)
        self.t += 1
        if not g.any():
            return
        eta = self._eta(g)
        self.x[i_t] = self.config.feasible.project_block(self.x[i_t] - eta * g)

    def iterate(self) -> CompoundVector:
        return CompoundVector(self.x.copy())


class IndependentEG(_RatedLearner):
    """N uncoupled exponentiated-gradient learners on the simplex."""

    def __init__(self, config: LearnerConfig, dim: int, x1=None):
        if config.regularizer.kind != "negentropy":
            raise ValueError("IndependentEG requires the negentropy regularizer")
        self.config = config
        self.dim = dim
        N = config.operator.n_tasks
        if x1 is None:
            self.x = np.full((N, dim), 1.0 / dim)
        else:
            X = as_matrix(x1).copy()
            for k in range(N):
                check_simplex(X[k], f"x1 block {k}")
            self.x = X
        self.t = 0

    @property
    def n_tasks(self) -> int:
        return self.config.operator.n_tasks

    def predict(self, i_t: int) -> np.ndarray:
        return self.x[i_t].copy()

    def step(self, i_t: int, g: np.ndarray) -> None:
        g = np.asarray(g, dtype=float)
        self.t += 1
        if not g.any():
            return
        eta = self._eta(g)
        self.x[i_t] = _eg_block_update(self.x[i_t], -eta * g)

    def iterate(self) -> CompoundVector:
        return CompoundVector(self.x.copy())


# ---------------------------------------------------------------------------
# generic proximal learner

class InnerSolverError(RuntimeError):
    pass


def _pgd(x0: np.ndarray, fval, fgrad, proj, tol: float = INNER_TOL,
         cap: int = INNER_CAP) -> np.ndarray:
    """Projected gradient with backtracking; stops when the gradient-mapping
    norm falls below tol."""
    x = proj(x0)
    f = fval(x)
    s = 1.0
    residual = np.inf
    for _ in range(cap):
        gr = fgrad(x)
        while True:
            z = proj(x - s * gr)
            dz = z - x
            quad = f + float((gr * dz).sum()) + float((dz * dz).sum()) / (2.0 * s)
            fz = fval(z)
            if fz <= quad + 1e-15 * (1.0 + abs(f)) or s < 1e-18:
                break
            s *= 0.5
        residual = float(np.sqrt((dz * dz).sum())) / s
        x, f = z, fz
        if residual <= tol:
            return x
        s *= 1.3
    raise InnerSolverError(
        f"inner solver did not reach tolerance {tol:g}: residual {residual:.3e} "
        f"after {cap} iterations")


def _psi_blocks(reg: Regularizer, Y: np.ndarray) -> float:
    # domain-free evaluation: the solver may probe slightly outside the
    # entropic domain, where the clamped extension keeps values finite
    if reg.kind == "negentropy":
        pos = np.maximum(Y, ENTROPY_CLAMP)
        return float((pos * np.log(pos)).sum())
    return float(sum(0.5 * norm(Y[k], reg.primal_norm) ** 2 for k in range(Y.shape[0])))


def _grad_blocks(reg: Regularizer, Y: np.ndarray) -> np.ndarray:
    if reg.kind == "negentropy":
        return 1.0 + np.log(np.maximum(Y, ENTROPY_CLAMP))
    return np.vstack([mirror_grad(reg, Y[k]) for k in range(Y.shape[0])])


class GenericMTOMD(_RatedLearner):
    """Multitask OMD through the proximal definition, any regularizer.

    State is the untransformed compound iterate x.  Each step solves
    argmin_{x in feasible} eta*<g, x_block_i> + B_psibar(A^{1/2}x, A^{1/2}x_t)
    by projected gradient: in y-coordinates when the feasible set is the
    Mahalanobis ball (where it becomes a Euclidean ball), directly in x with
    per-block projections otherwise.
    """

    def __init__(self, config: LearnerConfig, dim: int, x1=None):
        self.config = config
        self.dim = dim
        N = config.operator.n_tasks
        if x1 is not None:
            X = as_matrix(x1).copy()
        elif config.feasible.kind == "simplex":
            X = np.full((N, dim), 1.0 / dim)
        else:
            X = np.zeros((N, dim))
        if config.feasible.kind == "mahalanobis":
            Y = config.operator.sqrt @ X
            nrm = float(np.sqrt((Y ** 2).sum()))
            if nrm > config.feasible.radius:
                X = config.operator.inv_sqrt @ (Y * (config.feasible.radius / nrm))
        else:
            X = config.feasible.project_blocks(X)
        self.x = X
        self.t = 0

    @property
    def n_tasks(self) -> int:
        return self.config.operator.n_tasks

    def predict(self, i_t: int) -> np.ndarray:
        return self.x[i_t].copy()

    def step(self, i_t: int, g: np.ndarray) -> None:
        g = np.asarray(g, dtype=float)
        self.t += 1
        if not g.any():
            return
        eta = self._eta(g)
        if self.config.feasible.kind == "mahalanobis":
            self.x = self._solve_transformed(i_t, g, eta)
        else:
            self.x = self._solve_direct(i_t, g, eta)

    def _solve_transformed(self, i_t: int, g: np.ndarray, eta: float) -> np.ndarray:
        op = self.config.operator
        reg = self.config.regularizer
        radius = self.config.feasible.radius
        Yt = op.sqrt @ self.x
        C = eta * np.outer(op.inv_sqrt[:, i_t], g)
        grad_t = _grad_blocks(reg, Yt)

        def fval(Y):
            return (float((C * Y).sum()) + _psi_blocks(reg, Y) - _psi_blocks(reg, Yt)
                    - float((grad_t * (Y - Yt)).sum()))

        def fgrad(Y):
            return C + _grad_blocks(reg, Y) - grad_t

        def proj(Y):
            nrm = float(np.sqrt((Y ** 2).sum()))
            return Y * (radius / nrm) if nrm > radius else Y

        Y = _pgd(Yt.copy(), fval, fgrad, proj)
        return op.inv_sqrt @ Y

    def _solve_direct(self, i_t: int, g: np.ndarray, eta: float) -> np.ndarray:
        op = self.config.operator
        reg = self.config.regularizer
        feas = self.config.feasible
        Yt = op.sqrt @ self.x
        grad_t = _grad_blocks(reg, Yt)
        psi_t = _psi_blocks(reg, Yt)

        def fval(X):
            Y = op.sqrt @ X
            return (eta * float(g @ X[i_t]) + _psi_blocks(reg, Y) - psi_t
                    - float((grad_t * (Y - Yt)).sum()))

        def fgrad(X):
            Y = op.sqrt @ X
            G = op.sqrt @ (_grad_blocks(reg, Y) - grad_t)
            G[i_t] += eta * g
            return G

        return _pgd(self.x.copy(), fval, fgrad, feas.project_blocks)

    def iterate(self) -> CompoundVector:
        return CompoundVector(self.x.copy())
