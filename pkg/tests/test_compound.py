"""Unit tests for the stacked per-task state container."""

import numpy as np
import pytest

from mtomd.compound import CompoundVector, as_matrix


class TestCompoundVector:
    def test_shape_properties(self):
        u = CompoundVector(np.arange(6.0).reshape(3, 2))
        assert u.n_tasks == 3
        assert u.dim == 2

    def test_rejects_non_matrix(self):
        with pytest.raises(ValueError, match="2-d"):
            CompoundVector(np.arange(4.0))

    def test_zeros(self):
        u = CompoundVector.zeros(2, 3)
        assert u.data.shape == (2, 3)
        assert (u.data == 0).all()

    def test_from_blocks(self):
        u = CompoundVector.from_blocks([[1.0, 2.0], [3.0, 4.0]])
        np.testing.assert_array_equal(u.data, [[1.0, 2.0], [3.0, 4.0]])

    def test_flat_layout_keeps_task_order(self):
        u = CompoundVector(np.array([[1.0, 2.0], [3.0, 4.0]]))
        np.testing.assert_array_equal(u.flat(), [1.0, 2.0, 3.0, 4.0])
        v = CompoundVector.from_flat(u.flat(), 2)
        np.testing.assert_array_equal(v.data, u.data)

    def test_from_flat_length_check(self):
        with pytest.raises(ValueError, match="not divisible"):
            CompoundVector.from_flat(np.arange(5.0), 2)

    def test_block_is_a_view(self):
        u = CompoundVector.zeros(2, 2)
        u.block(1)[:] = 7.0
        np.testing.assert_array_equal(u.data[1], [7.0, 7.0])

    def test_mean_block(self):
        u = CompoundVector(np.array([[0.0, 2.0], [4.0, 6.0]]))
        np.testing.assert_array_equal(u.mean_block(), [2.0, 4.0])

    def test_copy_is_independent(self):
        u = CompoundVector.zeros(2, 2)
        v = u.copy()
        v.data[0, 0] = 5.0
        assert u.data[0, 0] == 0.0

    def test_repr(self):
        assert repr(CompoundVector.zeros(3, 4)) == "CompoundVector(n_tasks=3, dim=4)"


class TestAsMatrix:
    def test_passthrough(self):
        u = CompoundVector.zeros(2, 2)
        assert as_matrix(u) is u.data

    def test_array_coercion(self):
        got = as_matrix([[1, 2], [3, 4]])
        assert got.dtype == float
        assert got.shape == (2, 2)

    def test_rejects_wrong_rank(self):
        with pytest.raises(ValueError, match="expected"):
            as_matrix(np.arange(3))
