"""Interaction operators coupling the task blocks.

An interaction operator is a symmetric positive definite N x N matrix A
applied blockwise to compound vectors, i.e. as A kron I_d, without ever
materializing the Nd x Nd matrix.  Two families are supported:

  * clique(N, b):  A(b) = I_N + b*L with L = I - 11^T/N.  Square root,
    inverse and inverse square root all have rank-one closed forms, since
    A(b) acts as 1 on the all-ones direction and as 1+b on its complement.
  * laplacian(graph):  A = I_N + L^W for a weighted graph Laplacian
    L^W = diag(W1) - W, factored by symmetric eigendecomposition.

For both families A^{-1} and A^{-1/2} are doubly stochastic (nonnegative
entries, rows summing to one), which is what keeps the multiplicative
update on the simplex; laplacian_operator verifies this numerically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .compound import CompoundVector, as_matrix

B_CAP = 1e12          # A(b) conditioning cap for the b -> inf tuning limit
EIG_PD_TOL = 1e-12    # below this an eigenvalue means "not positive definite"
LAPLACIAN_EIG_TOL = 1e-8   # I + L^W must have spectrum >= 1
STOCHASTIC_ENTRY_TOL = 1e-12
STOCHASTIC_ROWSUM_TOL = 1e-10


@dataclass(frozen=True)
class GraphSpec:
    """Weighted undirected graph on the task set."""

    n_tasks: int
    weights: np.ndarray

    def __post_init__(self):
        W = np.asarray(self.weights, dtype=float)
        if W.shape != (self.n_tasks, self.n_tasks):
            raise ValueError(f"weights must be {self.n_tasks}x{self.n_tasks}, got {W.shape}")
        if not np.allclose(W, W.T, atol=1e-12):
            raise ValueError("weights must be symmetric")
        if (W < 0).any():
            raise ValueError("weights must be nonnegative")
        if np.abs(np.diag(W)).max(initial=0.0) > 0:
            raise ValueError("weights must have zero diagonal")
        object.__setattr__(self, "weights", W)

    def laplacian(self) -> np.ndarray:
        W = self.weights
        return np.diag(W.sum(axis=1)) - W


def clique_graph(n_tasks: int) -> GraphSpec:
    """Complete graph with weights 1/N; its Laplacian is I - 11^T/N."""
    W = np.full((n_tasks, n_tasks), 1.0 / n_tasks)
    np.fill_diagonal(W, 0.0)
    return GraphSpec(n_tasks, W)


@dataclass(frozen=True)
class InteractionOperator:
    n_tasks: int
    matrix: np.ndarray
    sqrt: np.ndarray
    inv: np.ndarray
    inv_sqrt: np.ndarray
    max_inv_diag: float
    closed_form: bool = False
    b: float | None = field(default=None)


def clique_operator(n_tasks: int, b: float) -> InteractionOperator:
    """A(b) = (1+b)I - b 11^T/N and its closed-form powers."""
    if n_tasks < 1:
        raise ValueError(f"n_tasks must be >= 1, got {n_tasks}")
    if b < 0:
        raise ValueError(f"b must be nonnegative, got {b}")
    b = min(float(b), B_CAP)
    N = n_tasks
    eye = np.eye(N)
    J = np.full((N, N), 1.0 / N)

    def powered(f: float) -> np.ndarray:
        # A(b) has eigenvalue 1 on the ones direction, 1+b on the rest
        return f * eye + (1.0 - f) * J

    op = InteractionOperator(
        n_tasks=N,
        matrix=powered(1.0 + b),
        sqrt=powered(np.sqrt(1.0 + b)),
        inv=powered(1.0 / (1.0 + b)),
        inv_sqrt=powered(1.0 / np.sqrt(1.0 + b)),
        max_inv_diag=(b + N) / ((1.0 + b) * N),
        closed_form=True,
        b=b,
    )
    return op


def laplacian_operator(graph: GraphSpec) -> InteractionOperator:
    """A = I + L^W via symmetric eigendecomposition, with stochasticity checks."""
    A = np.eye(graph.n_tasks) + graph.laplacian()
    eigvals, eigvecs = np.linalg.eigh(A)
    if eigvals.min() < EIG_PD_TOL:
        raise ValueError(f"interaction matrix not positive definite (min eig {eigvals.min():.3g})")
    if eigvals.min() < 1.0 - LAPLACIAN_EIG_TOL:
        raise ValueError(f"corrupted Laplacian: eigenvalue {eigvals.min():.12g} below 1")

    def powered(expo: float) -> np.ndarray:
        return (eigvecs * eigvals ** expo) @ eigvecs.T

    inv = powered(-1.0)
    inv_sqrt = powered(-0.5)
    for name, M in (("inv", inv), ("inv_sqrt", inv_sqrt)):
        if M.min() < -STOCHASTIC_ENTRY_TOL:
            raise ValueError(f"{name} has negative entry {M.min():.3g}; stochasticity violated")
        rowsums = M.sum(axis=1)
        if np.abs(rowsums - 1.0).max() > STOCHASTIC_ROWSUM_TOL:
            raise ValueError(f"{name} row sums deviate from 1 by {np.abs(rowsums - 1).max():.3g}")

    return InteractionOperator(
        n_tasks=graph.n_tasks,
        matrix=A,
        sqrt=powered(0.5),
        inv=inv,
        inv_sqrt=inv_sqrt,
        max_inv_diag=float(np.diag(inv).max()),
        closed_form=False,
    )


_WHICH = {"a": "matrix", "sqrt": "sqrt", "inv": "inv", "inv_sqrt": "inv_sqrt"}


def apply_block(op: InteractionOperator, which: str, X) -> CompoundVector:
    """Apply (M kron I_d) to a compound vector as an N x N action across blocks."""
    key = which.lower()
    if key not in _WHICH:
        raise ValueError(f"which must be one of {sorted(_WHICH)}, got {which!r}")
    Xm = as_matrix(X)
    if Xm.shape[0] != op.n_tasks:
        raise ValueError(f"expected {op.n_tasks} blocks, got {Xm.shape[0]}")
    M = getattr(op, _WHICH[key])
    return CompoundVector(M @ Xm)


def sqrt_block_action(b: float, X) -> CompoundVector:
    """Blockwise closed form of A(b)^{1/2}: sqrt(1+b)*block + (1-sqrt(1+b))*mean."""
    if b < 0:
        raise ValueError(f"b must be nonnegative, got {b}")
    b = min(float(b), B_CAP)
    Xm = as_matrix(X)
    s = np.sqrt(1.0 + b)
    return CompoundVector(s * Xm + (1.0 - s) * Xm.mean(axis=0))


def load_graph(path: str) -> GraphSpec:
    """Read a GraphSpec from an edge-list file.

    Lines are "i j w" with 0-based task indices; blank lines and '#'
    comments are ignored.  Repeated edges keep the last weight seen.
    """
    edges = []
    max_idx = -1
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'i j w', got {raw.rstrip()!r}")
            try:
                i, j, w = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            if i < 0 or j < 0:
                raise ValueError(f"{path}:{lineno}: negative task index")
            if i == j:
                raise ValueError(f"{path}:{lineno}: self-loop not allowed")
            if w < 0:
                raise ValueError(f"{path}:{lineno}: negative weight")
            edges.append((i, j, w))
            max_idx = max(max_idx, i, j)
    if max_idx < 0:
        raise ValueError(f"{path}: no edges")
    N = max_idx + 1
    W = np.zeros((N, N))
    for i, j, w in edges:
        W[i, j] = W[j, i] = w
    return GraphSpec(N, W)
