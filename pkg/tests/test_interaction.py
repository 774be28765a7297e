"""Unit tests for interaction operators and their closed forms."""

import numpy as np
import pytest

from mtomd.compound import CompoundVector
from mtomd.interaction import (
    B_CAP,
    GraphSpec,
    apply_block,
    clique_graph,
    clique_operator,
    laplacian_operator,
    load_graph,
    sqrt_block_action,
)


def _clique_matrix(N: int, b: float) -> np.ndarray:
    return (1.0 + b) * np.eye(N) - b * np.full((N, N), 1.0 / N)


def _random_graph(rng, N: int) -> GraphSpec:
    W = np.triu(rng.uniform(0.0, 2.0, size=(N, N)) * (rng.random((N, N)) < 0.6), k=1)
    W = W + W.T
    return GraphSpec(N, W)


class TestGraphSpec:
    def test_laplacian_rows_sum_to_zero(self):
        rng = np.random.default_rng(0)
        g = _random_graph(rng, 6)
        L = g.laplacian()
        np.testing.assert_allclose(L.sum(axis=1), 0.0, atol=1e-12)
        np.testing.assert_allclose(L, L.T, atol=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError, match="symmetric"):
            GraphSpec(2, np.array([[0.0, 1.0], [2.0, 0.0]]))
        with pytest.raises(ValueError, match="nonnegative"):
            GraphSpec(2, np.array([[0.0, -1.0], [-1.0, 0.0]]))
        with pytest.raises(ValueError, match="zero diagonal"):
            GraphSpec(2, np.array([[1.0, 0.0], [0.0, 1.0]]))
        with pytest.raises(ValueError, match="must be 3x3"):
            GraphSpec(3, np.zeros((2, 2)))

    def test_clique_graph_laplacian(self):
        N = 5
        L = clique_graph(N).laplacian()
        want = np.eye(N) - np.full((N, N), 1.0 / N)
        np.testing.assert_allclose(L, want, atol=1e-12)


class TestCliqueClosedForms:
    """The four stored powers must match a dense eigendecomposition."""

    def test_matches_eigendecomposition_oracle(self):
        for N in (1, 2, 4, 8, 16):
            for b in (0.0, 0.5, 1.0, float(N), 10.0 * N):
                op = clique_operator(N, b)
                A = _clique_matrix(N, b)
                vals, vecs = np.linalg.eigh(A)

                def powered(e):
                    return (vecs * vals ** e) @ vecs.T

                for got, e in ((op.matrix, 1.0), (op.sqrt, 0.5),
                               (op.inv, -1.0), (op.inv_sqrt, -0.5)):
                    assert np.abs(got - powered(e)).max() <= 1e-9

    def test_max_inv_diag_closed_form(self):
        for N in (1, 2, 5, 9):
            for b in (0.0, 0.7, 3.0, 50.0):
                op = clique_operator(N, b)
                assert op.max_inv_diag == (b + N) / ((1.0 + b) * N)
                assert abs(op.max_inv_diag - np.diag(op.inv).max()) <= 1e-12

    def test_b_zero_gives_identity(self):
        op = clique_operator(4, 0.0)
        for M in (op.matrix, op.sqrt, op.inv, op.inv_sqrt):
            np.testing.assert_allclose(M, np.eye(4), atol=1e-14)

    def test_b_is_capped(self):
        op = clique_operator(3, 1e15)
        assert op.b == B_CAP
        assert np.isfinite(op.matrix).all()

    def test_validation(self):
        with pytest.raises(ValueError, match="n_tasks"):
            clique_operator(0, 1.0)
        with pytest.raises(ValueError, match="nonnegative"):
            clique_operator(3, -0.1)

    def test_inverse_pair(self):
        rng = np.random.default_rng(1)
        for b in (0.3, 2.0, 17.0):
            op = clique_operator(6, b)
            np.testing.assert_allclose(op.matrix @ op.inv, np.eye(6), atol=1e-10)
            np.testing.assert_allclose(op.sqrt @ op.inv_sqrt, np.eye(6), atol=1e-10)
            np.testing.assert_allclose(op.sqrt @ op.sqrt, op.matrix, atol=1e-10)


class TestDoubleStochasticity:
    def test_clique_inverse_rows(self):
        for N in (2, 5, 11):
            for b in (0.0, 1.0, 10.0):
                op = clique_operator(N, b)
                for M in (op.inv, op.inv_sqrt):
                    assert M.min() >= -1e-12
                    np.testing.assert_allclose(M.sum(axis=1), 1.0, atol=1e-10)

    def test_random_graph_inverse_rows(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            N = int(rng.integers(2, 11))
            op = laplacian_operator(_random_graph(rng, N))
            for M in (op.inv, op.inv_sqrt):
                assert M.min() >= -1e-12
                np.testing.assert_allclose(M.sum(axis=1), 1.0, atol=1e-10)


class TestLaplacianOperator:
    def test_matches_clique_operator_on_clique_graph(self):
        N = 6
        lap = laplacian_operator(clique_graph(N))
        cli = clique_operator(N, 1.0)
        np.testing.assert_allclose(lap.matrix, cli.matrix, atol=1e-12)
        np.testing.assert_allclose(lap.inv_sqrt, cli.inv_sqrt, atol=1e-10)
        assert lap.max_inv_diag == pytest.approx(cli.max_inv_diag, abs=1e-12)

    def test_disconnected_graph_still_positive_definite(self):
        W = np.zeros((4, 4))
        W[0, 1] = W[1, 0] = 1.0     # nodes 2 and 3 isolated
        op = laplacian_operator(GraphSpec(4, W))
        vals = np.linalg.eigvalsh(op.matrix)
        assert vals.min() >= 1.0 - 1e-10

    def test_spectrum_floor(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            op = laplacian_operator(_random_graph(rng, 7))
            assert np.linalg.eigvalsh(op.matrix).min() >= 1.0 - 1e-8


class TestBlockApplication:
    def test_matches_dense_matrix_product(self):
        rng = np.random.default_rng(4)
        op = clique_operator(5, 2.0)
        X = rng.normal(size=(5, 3))
        for which, M in (("a", op.matrix), ("sqrt", op.sqrt),
                         ("inv", op.inv), ("inv_sqrt", op.inv_sqrt)):
            got = apply_block(op, which, CompoundVector(X))
            np.testing.assert_allclose(got.data, M @ X, rtol=1e-12)

    def test_unknown_action_rejected(self):
        op = clique_operator(2, 1.0)
        with pytest.raises(ValueError, match="which must be one of"):
            apply_block(op, "cube", np.zeros((2, 2)))

    def test_block_count_mismatch_rejected(self):
        op = clique_operator(3, 1.0)
        with pytest.raises(ValueError, match="expected 3 blocks"):
            apply_block(op, "inv", np.zeros((2, 4)))

    def test_sqrt_block_action_matches_operator(self):
        rng = np.random.default_rng(5)
        for b in (0.0, 0.8, 7.0):
            X = rng.normal(size=(4, 3))
            got = sqrt_block_action(b, X)
            want = apply_block(clique_operator(4, b), "sqrt", X)
            np.testing.assert_allclose(got.data, want.data, rtol=1e-12, atol=1e-12)

    def test_sqrt_block_action_rejects_negative_b(self):
        with pytest.raises(ValueError, match="nonnegative"):
            sqrt_block_action(-1.0, np.zeros((2, 2)))


class TestLoadGraph:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "edges.txt"
        path.write_text("# a comment\n0 1 2.0\n\n1 2 0.5  # trailing comment\n")
        g = load_graph(str(path))
        assert g.n_tasks == 3
        assert g.weights[0, 1] == 2.0
        assert g.weights[2, 1] == 0.5
        assert g.weights[0, 2] == 0.0

    def test_last_weight_wins(self, tmp_path):
        path = tmp_path / "edges.txt"
        path.write_text("0 1 1.0\n0 1 3.0\n")
        assert load_graph(str(path)).weights[0, 1] == 3.0

    def test_errors_carry_line_numbers(self, tmp_path):
        cases = [
            ("0 1\n", "expected 'i j w'"),
            ("0 x 1.0\n", "invalid literal"),
            ("0 0 1.0\n", "self-loop"),
            ("-1 1 1.0\n", "negative task index"),
            ("0 1 -2.0\n", "negative weight"),
        ]
        for text, match in cases:
            path = tmp_path / "bad.txt"
            path.write_text(text)
            with pytest.raises(ValueError, match=match):
                load_graph(str(path))

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.txt"
        path.write_text("# only comments\n")
        with pytest.raises(ValueError, match="no edges"):
            load_graph(str(path))
