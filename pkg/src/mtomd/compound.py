"""Compound vectors: one point per task, stacked into a single state.

A compound vector holds N task blocks of dimension d each.  Internally it
is an (N, d) C-contiguous array, so the flattened view lays block i out on
coordinates [i*d, (i+1)*d), which is the layout every blockwise operator in
this package assumes.
"""

from __future__ import annotations

import numpy as np


class CompoundVector:
    """N stacked task vectors of shared dimension d."""

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray):
        data = np.asarray(data, dtype=float)
        if data.ndim != 2:
            raise ValueError(f"compound data must be 2-d (n_tasks, dim), got shape {data.shape}")
        self.data = np.ascontiguousarray(data)

    @classmethod
    def zeros(cls, n_tasks: int, dim: int) -> "CompoundVector":
        return cls(np.zeros((n_tasks, dim)))

    @classmethod
    def from_blocks(cls, blocks) -> "CompoundVector":
        return cls(np.vstack([np.asarray(b, dtype=float) for b in blocks]))

    @classmethod
    def from_flat(cls, flat: np.ndarray, n_tasks: int) -> "CompoundVector":
        flat = np.asarray(flat, dtype=float)
        if flat.size % n_tasks != 0:
            raise ValueError(f"flat length {flat.size} not divisible by n_tasks={n_tasks}")
        return cls(flat.reshape(n_tasks, -1))

    @property
    def n_tasks(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    def block(self, i: int) -> np.ndarray:
        """View of task i's block (length d)."""
        return self.data[i]

    def mean_block(self) -> np.ndarray:
        """Average of the task blocks (length d)."""
        return self.data.mean(axis=0)

    def flat(self) -> np.ndarray:
        """Flattened (N*d,) view, blocks concatenated in task order."""
        return self.data.reshape(-1)

    def copy(self) -> "CompoundVector":
        return CompoundVector(self.data.copy())

    def __repr__(self) -> str:
        return f"CompoundVector(n_tasks={self.n_tasks}, dim={self.dim})"


def as_matrix(u) -> np.ndarray:
    """Coerce a CompoundVector or (N, d) array to an (N, d) float array."""
    if isinstance(u, CompoundVector):
        return u.data
    m = np.asarray(u, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"expected (n_tasks, dim) array, got shape {m.shape}")
    return m
