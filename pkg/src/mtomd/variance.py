"""Task-dispersion measures and comparator-set membership.

The variance of a compound vector measures how far the task blocks spread
around their mean (norm kinds) or how large the coordinatewise relative
range is (simplex kind).  Tuning and projections consume these through a
VarianceSpec carrying the similarity budget sigma and the diameter D.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .compound import as_matrix
from .geometry import L2, NormTag, check_simplex, norm
from .interaction import B_CAP, GraphSpec

SIGMA_CAP_THRESHOLD = 1e-6
MEMBERSHIP_SLACK = 1e-12


def norm_variance(U, tag: NormTag = L2) -> float:
    """(1/(N-1)) sum_i ||U_i - mean||^2 in the tagged norm; 0 when N = 1."""
    Um = as_matrix(U)
    N = Um.shape[0]
    if N <= 1:
        return 0.0
    centered = Um - Um.mean(axis=0)
    if tag.kind == "l2":
        return float((centered ** 2).sum() / (N - 1))
    return float(sum(norm(c, tag) ** 2 for c in centered) / (N - 1))


def simplex_variance(U) -> float:
    """Largest squared relative coordinate range across tasks, 0/0 := 0."""
    Um = as_matrix(U)
    for i in range(Um.shape[0]):
        check_simplex(Um[i], f"block {i}")
    hi = Um.max(axis=0)
    lo = Um.min(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(hi > 0.0, (hi - lo) / np.where(hi > 0.0, hi, 1.0), 0.0)
    return float((rel ** 2).max())


def local_norm_variance(U, graph: GraphSpec, tag: NormTag = L2) -> float:
    """Weighted pairwise spread sum_{i<j} W_ij ||U_i - U_j||^2.

    Matches the quadratic form u^T (L^W kron I_d) u; for the clique with
    weights 1/N and the l2 norm this equals (N-1) * norm_variance.
    """
    Um = as_matrix(U)
    if Um.shape[0] != graph.n_tasks:
        raise ValueError(f"expected {graph.n_tasks} blocks, got {Um.shape[0]}")
    W = graph.weights
    total = 0.0
    for i in range(graph.n_tasks):
        for j in range(i + 1, graph.n_tasks):
            if W[i, j] > 0.0:
                total += W[i, j] * norm(Um[i] - Um[j], tag) ** 2
    return float(total)


def local_simplex_variance(U, graph: GraphSpec) -> float:
    """Neighborhood variant of simplex_variance.

    Coordinate ranges are taken over each node's neighborhood (the node
    itself included), then maximized over nodes and coordinates.  On the
    clique it reduces to simplex_variance.
    """
    Um = as_matrix(U)
    if Um.shape[0] != graph.n_tasks:
        raise ValueError(f"expected {graph.n_tasks} blocks, got {Um.shape[0]}")
    for i in range(Um.shape[0]):
        check_simplex(Um[i], f"block {i}")
    worst = 0.0
    for i in range(graph.n_tasks):
        nbhd = np.flatnonzero(graph.weights[i] > 0.0).tolist()
        nbhd.append(i)
        sub = Um[nbhd]
        hi = sub.max(axis=0)
        lo = sub.min(axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            rel = np.where(hi > 0.0, (hi - lo) / np.where(hi > 0.0, hi, 1.0), 0.0)
        worst = max(worst, float((rel ** 2).max()))
    return worst


def admissible_b_simplex(sigma: float) -> float:
    """Largest coupling b keeping the entropic update feasible: (1-sigma^2)/sigma^2."""
    if sigma < 0 or sigma > 1:
        raise ValueError(f"sigma must lie in [0, 1], got {sigma}")
    if sigma < SIGMA_CAP_THRESHOLD:
        return B_CAP
    return min((1.0 - sigma ** 2) / sigma ** 2, B_CAP)


@dataclass(frozen=True)
class VarianceSpec:
    """Comparator-set description: which variance, the budget sigma, the diameter D."""

    kind: str                      # "norm" | "simplex" | "local"
    sigma: float
    diameter: float = 1.0          # unused for the simplex kind
    norm_tag: NormTag = L2
    graph: GraphSpec | None = None

    def __post_init__(self):
        if self.kind not in ("norm", "simplex", "local"):
            raise ValueError(f"unknown variance kind {self.kind!r}")
        if not 0.0 <= self.sigma <= 1.0:
            raise ValueError(f"sigma must lie in [0, 1], got {self.sigma}")
        if self.kind != "simplex" and self.diameter <= 0:
            raise ValueError(f"diameter must be positive, got {self.diameter}")
        if self.kind == "local" and self.graph is None:
            raise ValueError("local variance requires a graph")

    def threshold(self) -> float:
        if self.kind == "simplex":
            return self.sigma ** 2
        return self.sigma ** 2 * self.diameter ** 2

    def measure(self, U) -> float:
        if self.kind == "norm":
            return norm_variance(U, self.norm_tag)
        if self.kind == "simplex":
            return simplex_variance(U)
        return local_norm_variance(U, self.graph, self.norm_tag)


def in_comparator_set(U, spec: VarianceSpec) -> bool:
    """True iff the relevant variance is within the spec's budget (1e-12 slack)."""
    return spec.measure(U) <= spec.threshold() + MEMBERSHIP_SLACK
