"""Mirror geometries: norms, regularizers, Bregman divergences.

Three regularizers are supported, each a descriptor of one mirror geometry:

  * euclidean   psi(x) = 1/2 ||x||_2^2,   strong convexity 1 w.r.t. l2
  * pnorm(p)    psi(x) = 1/2 ||x||_p^2,   strong convexity p-1 w.r.t. lp, 1 < p <= 2
  * negentropy  psi(x) = sum_j x_j ln x_j on the simplex, strong convexity 1 w.r.t. l1

Conventions: 0*ln(0) := 0; simplex membership is tested with tolerance
1e-9 on the coordinate sum and -1e-12 on entries; entropic inputs are
clamped below at 1e-300 then renormalized before any logarithm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SIMPLEX_SUM_TOL = 1e-9
SIMPLEX_ENTRY_TOL = 1e-12
ENTROPY_CLAMP = 1e-300


# ---------------------------------------------------------------------------
# norms

@dataclass(frozen=True)
class NormTag:
    """Tag identifying a norm: 'l1', 'l2', 'linf', or 'lp' with an exponent."""

    kind: str
    p: float | None = None

    def __post_init__(self):
        if self.kind not in ("l1", "l2", "linf", "lp"):
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.kind == "lp":
            if self.p is None or self.p < 1:
                raise ValueError(f"lp norm requires p >= 1, got {self.p}")


L1 = NormTag("l1")
L2 = NormTag("l2")
LINF = NormTag("linf")


def lp(p: float) -> NormTag:
    return NormTag("lp", float(p))


def norm(x: np.ndarray, tag: NormTag) -> float:
    x = np.asarray(x, dtype=float)
    if tag.kind == "l1":
        return float(np.abs(x).sum())
    if tag.kind == "l2":
        return float(np.linalg.norm(x))
    if tag.kind == "linf":
        return float(np.abs(x).max()) if x.size else 0.0
    return float(np.sum(np.abs(x) ** tag.p) ** (1.0 / tag.p))


def dual_norm_tag(tag: NormTag) -> NormTag:
    """Conjugate norm: l2<->l2, l1<->linf, lp<->lq with 1/p + 1/q = 1."""
    if tag.kind == "l2":
        return L2
    if tag.kind == "l1":
        return LINF
    if tag.kind == "linf":
        return L1
    if tag.p == 1.0:
        return LINF
    return lp(tag.p / (tag.p - 1.0))


# ---------------------------------------------------------------------------
# regularizers

@dataclass(frozen=True)
class Regularizer:
    """Mirror-geometry descriptor. Build via euclidean(), pnorm(p), negentropy()."""

    kind: str
    p: float | None = None

    @property
    def lam(self) -> float:
        """Strong-convexity constant with respect to the primal norm."""
        if self.kind == "pnorm":
            return self.p - 1.0
        return 1.0

    @property
    def primal_norm(self) -> NormTag:
        if self.kind == "euclidean":
            return L2
        if self.kind == "pnorm":
            return lp(self.p)
        return L1

    @property
    def dual_norm(self) -> NormTag:
        return dual_norm_tag(self.primal_norm)

    @property
    def domain(self) -> str:
        return "simplex" if self.kind == "negentropy" else "all"


def euclidean() -> Regularizer:
    return Regularizer("euclidean")


def pnorm(p: float) -> Regularizer:
    if not 1.0 < p <= 2.0:
        raise ValueError(f"pnorm requires p in (1, 2], got {p}")
    return Regularizer("pnorm", float(p))


def negentropy() -> Regularizer:
    return Regularizer("negentropy")


# ---------------------------------------------------------------------------
# domain handling

def check_simplex(x: np.ndarray, where: str = "") -> None:
    x = np.asarray(x, dtype=float)
    if abs(x.sum() - 1.0) > SIMPLEX_SUM_TOL or (x < -SIMPLEX_ENTRY_TOL).any():
        raise ValueError(f"not on the simplex{' (' + where + ')' if where else ''}: "
                         f"sum={x.sum():.12g}, min={x.min():.3g}")


def _check_domain(reg: Regularizer, x: np.ndarray) -> None:
    if reg.domain == "simplex":
        check_simplex(x, reg.kind)


def clamp_simplex(x: np.ndarray) -> np.ndarray:
    """Clamp entries below at 1e-300 and renormalize to unit sum."""
    y = np.maximum(np.asarray(x, dtype=float), ENTROPY_CLAMP)
    return y / y.sum()


# ---------------------------------------------------------------------------
# mirror maps

def psi_value(reg: Regularizer, x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    _check_domain(reg, x)
    if reg.kind == "euclidean":
        return 0.5 * float(x @ x)
    if reg.kind == "pnorm":
        return 0.5 * norm(x, reg.primal_norm) ** 2
    pos = np.maximum(x, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(pos > 0.0, pos * np.log(np.maximum(pos, ENTROPY_CLAMP)), 0.0)
    return float(terms.sum())


def mirror_grad(reg: Regularizer, x: np.ndarray) -> np.ndarray:
    """Gradient of psi (the mirror map) at x."""
    x = np.asarray(x, dtype=float)
    _check_domain(reg, x)
    if reg.kind == "euclidean":
        return x.copy()
    if reg.kind == "pnorm":
        p = reg.p
        nx = norm(x, reg.primal_norm)
        if nx == 0.0:
            # 0/0 limit at the minimum; zero is the subgradient selection
            return np.zeros_like(x)
        return np.sign(x) * np.abs(x) ** (p - 1.0) * nx ** (2.0 - p)
    return 1.0 + np.log(clamp_simplex(x))


def bregman(reg: Regularizer, x: np.ndarray, y: np.ndarray) -> float:
    """B_psi(x, y) = psi(x) - psi(y) - <grad psi(y), x - y>."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    if reg.kind == "negentropy":
        xs, ys = clamp_simplex(x), clamp_simplex(y)
        _check_domain(reg, x)
        _check_domain(reg, y)
        # specializes to KL divergence on the simplex; clamped form avoids 0*inf
        return float(np.sum(xs * (np.log(xs) - np.log(ys))))
    return (psi_value(reg, x) - psi_value(reg, y)
            - float(mirror_grad(reg, y) @ (x - y)))


def compound_bregman(reg: Regularizer, X, Y) -> float:
    """Sum of blockwise Bregman divergences over the task blocks."""
    from .compound import as_matrix

    Xm, Ym = as_matrix(X), as_matrix(Y)
    if Xm.shape != Ym.shape:
        raise ValueError(f"block shape mismatch: {Xm.shape} vs {Ym.shape}")
    return float(sum(bregman(reg, Xm[i], Ym[i]) for i in range(Xm.shape[0])))
