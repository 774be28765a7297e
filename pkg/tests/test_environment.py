"""Unit tests for losses, schedules, stream generators, CSV ingestion,
and the exact batch comparator."""

import math

import numpy as np
import pytest

from mtomd.environment import (
    LOGWEALTH_CLAMP,
    LossInstance,
    Round,
    ScheduleSpec,
    SimplexTaskSpec,
    SyntheticTaskSpec,
    batch_comparator,
    lipschitz_bound,
    load_csv,
    logwealth_clamped,
    loss_subgradient,
    loss_value,
    make_lower_bound_instance,
    make_lower_bound_rounds,
    make_schedule,
    make_synthetic,
    make_synthetic_simplex,
)
from mtomd.geometry import L1, L2, LINF
from mtomd.learners import norm_ball, simplex_set
from mtomd.variance import norm_variance, simplex_variance


def _fd_grad(inst, w, h=1e-6):
    g = np.zeros_like(w)
    for j in range(w.size):
        e = np.zeros_like(w)
        e[j] = h
        g[j] = (loss_value(inst, w + e) - loss_value(inst, w - e)) / (2 * h)
    return g


# ---------------------------------------------------------------------------
# losses

class TestLossValues:
    def test_square(self):
        inst = LossInstance("square", np.array([1.0, 2.0]), 3.0)
        assert loss_value(inst, np.array([1.0, 0.0])) == pytest.approx(4.0)

    def test_logistic(self):
        inst = LossInstance("logistic", np.array([2.0]), 1.0)
        assert loss_value(inst, np.array([0.0])) == pytest.approx(math.log(2.0))
        assert loss_value(inst, np.array([1.0])) == pytest.approx(
            math.log(1 + math.exp(-2.0)))

    def test_logwealth(self):
        inst = LossInstance("logwealth", np.array([2.0, 0.5]))
        w = np.array([0.5, 1.0])
        assert loss_value(inst, w) == pytest.approx(-math.log(1.5))

    def test_linear(self):
        inst = LossInstance("linear", np.array([1.0, -2.0]))
        assert loss_value(inst, np.array([3.0, 1.0])) == pytest.approx(1.0)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="unknown loss kind"):
            LossInstance("hinge", np.ones(2))

    def test_logwealth_needs_positive_features(self):
        with pytest.raises(ValueError, match="strictly positive"):
            LossInstance("logwealth", np.array([1.0, 0.0]))

    def test_logistic_needs_sign_label(self):
        with pytest.raises(ValueError, match="-1 or \\+1"):
            LossInstance("logistic", np.ones(2), 0.5)


class TestLossSubgradients:
    def test_matches_finite_differences(self):
        rng = np.random.default_rng(0)
        cases = [
            LossInstance("square", rng.normal(size=4), 0.7),
            LossInstance("logistic", rng.normal(size=4), -1.0),
            LossInstance("logwealth", rng.uniform(0.5, 2.0, size=4)),
            LossInstance("linear", rng.normal(size=4)),
        ]
        for inst in cases:
            w = rng.uniform(0.2, 0.8, size=4)
            got = loss_subgradient(inst, w)
            np.testing.assert_allclose(got, _fd_grad(inst, w), rtol=1e-5, atol=1e-7)

    def test_logistic_extreme_margins_are_finite(self):
        inst = LossInstance("logistic", np.array([1.0]), 1.0)
        for z in (-1e4, 1e4):
            g = loss_subgradient(inst, np.array([z]))
            assert np.isfinite(g).all()
        # deep in the correct-classification tail the gradient vanishes
        assert abs(loss_subgradient(inst, np.array([50.0]))[0]) < 1e-20
        # deep in the mistake tail it saturates at -y*x
        np.testing.assert_allclose(loss_subgradient(inst, np.array([-50.0])),
                                   [-1.0], rtol=1e-12)

    def test_logwealth_clamp(self):
        inst = LossInstance("logwealth", np.array([1.0, 1.0]))
        w = np.array([-1.0, 0.0])
        assert logwealth_clamped(inst, w)
        assert np.isfinite(loss_value(inst, w))
        assert np.isfinite(loss_subgradient(inst, w)).all()
        assert not logwealth_clamped(inst, np.array([0.5, 0.5]))

    def test_clamped_value_matches_floor(self):
        inst = LossInstance("logwealth", np.array([1.0]))
        assert loss_value(inst, np.array([0.0])) == pytest.approx(
            -math.log(LOGWEALTH_CLAMP))


# ---------------------------------------------------------------------------
# schedules

class TestSchedules:
    def test_round_robin(self):
        got = make_schedule(ScheduleSpec("round_robin"), 7, 3)
        np.testing.assert_array_equal(got, [0, 1, 2, 0, 1, 2, 0])

    def test_blocked(self):
        got = make_schedule(ScheduleSpec("blocked", block_len=2), 8, 2)
        np.testing.assert_array_equal(got, [0, 0, 1, 1, 0, 0, 1, 1])

    def test_uniform_random_deterministic_and_in_range(self):
        spec = ScheduleSpec("uniform_random", seed=11)
        a = make_schedule(spec, 100, 5)
        b = make_schedule(spec, 100, 5)
        np.testing.assert_array_equal(a, b)
        assert a.min() >= 0 and a.max() < 5

    def test_from_data_cannot_be_generated(self):
        with pytest.raises(ValueError, match="come with the data"):
            make_schedule(ScheduleSpec("from_data"), 4, 2)

    def test_validation(self):
        with pytest.raises(ValueError, match="unknown schedule"):
            ScheduleSpec("zigzag")
        with pytest.raises(ValueError, match="block_len"):
            ScheduleSpec("blocked", block_len=0)
        with pytest.raises(ValueError, match=">= 1"):
            make_schedule(ScheduleSpec("round_robin"), 0, 3)


# ---------------------------------------------------------------------------
# synthetic streams

class TestMakeSynthetic:
    def test_variance_is_exact(self):
        for spread in (0.05, 0.2, 0.7):
            spec = SyntheticTaskSpec(6, 4, center_norm=0.4, spread=spread, seed=3)
            _, U = make_synthetic(spec, 12, ScheduleSpec("round_robin"))
            assert norm_variance(U) == pytest.approx(spread ** 2, rel=1e-12)

    def test_zero_spread_gives_identical_blocks(self):
        spec = SyntheticTaskSpec(4, 3, center_norm=0.5, spread=0.0, seed=1)
        _, U = make_synthetic(spec, 8, ScheduleSpec("round_robin"))
        assert norm_variance(U) == pytest.approx(0.0, abs=1e-30)
        assert np.linalg.norm(U.data[0]) == pytest.approx(0.5, rel=1e-12)

    def test_unit_norm_features_and_realizable_labels(self):
        spec = SyntheticTaskSpec(3, 4, center_norm=0.4, spread=0.1, seed=2)
        rounds, U = make_synthetic(spec, 30, ScheduleSpec("round_robin"))
        assert len(rounds) == 30
        for r in rounds:
            assert np.linalg.norm(r.loss.features) == pytest.approx(1.0, rel=1e-12)
            want = float(U.data[r.active_task] @ r.loss.features)
            assert r.loss.label == pytest.approx(want, abs=1e-12)

    def test_noise_perturbs_labels(self):
        spec = SyntheticTaskSpec(2, 3, center_norm=0.4, spread=0.1,
                                 noise_std=0.5, seed=2)
        rounds, U = make_synthetic(spec, 50, ScheduleSpec("round_robin"))
        resid = [r.loss.label - float(U.data[r.active_task] @ r.loss.features)
                 for r in rounds]
        assert np.std(resid) > 0.2

    def test_determinism(self):
        spec = SyntheticTaskSpec(3, 4, center_norm=0.4, spread=0.1, seed=9)
        r1, u1 = make_synthetic(spec, 20, ScheduleSpec("round_robin"))
        r2, u2 = make_synthetic(spec, 20, ScheduleSpec("round_robin"))
        np.testing.assert_array_equal(u1.data, u2.data)
        for a, b in zip(r1, r2):
            np.testing.assert_array_equal(a.loss.features, b.loss.features)
            assert a.loss.label == b.loss.label

    def test_block_norm_cap_respected(self):
        spec = SyntheticTaskSpec(8, 3, center_norm=0.3, spread=0.2, seed=4,
                                 max_block_norm=0.6)
        _, U = make_synthetic(spec, 8, ScheduleSpec("round_robin"))
        assert np.linalg.norm(U.data, axis=1).max() <= 0.6

    def test_impossible_cap_raises(self):
        spec = SyntheticTaskSpec(8, 3, center_norm=1.0, spread=0.5, seed=4,
                                 max_block_norm=0.1)
        with pytest.raises(ValueError, match="max_block_norm"):
            make_synthetic(spec, 8, ScheduleSpec("round_robin"))

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            SyntheticTaskSpec(0, 3)
        with pytest.raises(ValueError):
            SyntheticTaskSpec(2, 3, spread=-0.1)


class TestMakeSyntheticSimplex:
    def test_blocks_on_simplex(self):
        spec = SimplexTaskSpec(5, 6, target_range_var=0.1, seed=0)
        rounds, U = make_synthetic_simplex(spec, 10, ScheduleSpec("round_robin"))
        for k in range(5):
            assert U.data[k].sum() == pytest.approx(1.0, abs=1e-9)
            assert U.data[k].min() >= spec.min_entry - 1e-12

    def test_variance_hit_from_below(self):
        for target in (0.05, 0.2, 0.5):
            spec = SimplexTaskSpec(6, 5, target_range_var=target, seed=1)
            _, U = make_synthetic_simplex(spec, 6, ScheduleSpec("round_robin"))
            v = simplex_variance(U)
            assert v <= target + 1e-12
            assert v > 0.0

    def test_zero_target_gives_identical_blocks(self):
        spec = SimplexTaskSpec(4, 5, target_range_var=0.0, seed=2)
        _, U = make_synthetic_simplex(spec, 4, ScheduleSpec("round_robin"))
        assert simplex_variance(U) == pytest.approx(0.0, abs=1e-30)

    def test_features_positive(self):
        spec = SimplexTaskSpec(3, 4, target_range_var=0.1, seed=3)
        rounds, _ = make_synthetic_simplex(spec, 20, ScheduleSpec("round_robin"))
        for r in rounds:
            assert r.loss.features.min() >= 0.2
            assert r.loss.features.max() <= 1.0

    def test_spec_validation(self):
        with pytest.raises(ValueError, match="dim >= 2"):
            SimplexTaskSpec(2, 1)
        with pytest.raises(ValueError, match="target_range_var"):
            SimplexTaskSpec(2, 3, target_range_var=1.0)


class TestLowerBoundConstruction:
    def test_shape_and_exact_variance(self):
        for d, sigma in [(2, 0.3), (4, 0.5), (8, 0.1)]:
            U = make_lower_bound_instance(d, sigma)
            assert U.n_tasks == 2 * d
            assert U.dim == d
            assert norm_variance(U) == pytest.approx(sigma ** 2, abs=1e-10)

    def test_sigma_range_enforced(self):
        with pytest.raises(ValueError, match="sigma"):
            make_lower_bound_instance(3, 0.0)
        with pytest.raises(ValueError, match="sigma"):
            make_lower_bound_instance(3, 1.0 / math.sqrt(2.0))

    def test_rounds_round_robin_with_balanced_signs(self):
        U = make_lower_bound_instance(3, 0.4)
        N = U.n_tasks
        rounds = make_lower_bound_rounds(U, 4)
        assert len(rounds) == 4 * N
        for t, r in enumerate(rounds):
            assert r.active_task == t % N
            assert r.loss.kind == "linear"
            assert np.linalg.norm(r.loss.features) == pytest.approx(1.0, rel=1e-12)
        # per task the gradients cancel, so the best fixed point earns zero
        for i in range(N):
            gsum = sum(r.loss.features for r in rounds if r.active_task == i)
            np.testing.assert_allclose(gsum, np.zeros(3), atol=1e-12)

    def test_rounds_per_task_must_be_even(self):
        U = make_lower_bound_instance(2, 0.3)
        with pytest.raises(ValueError, match="even"):
            make_lower_bound_rounds(U, 3)


# ---------------------------------------------------------------------------
# CSV ingestion

class TestLoadCsv:
    def _write(self, tmp_path, text):
        p = tmp_path / "data.csv"
        p.write_text(text)
        return str(p)

    def test_round_trip(self, tmp_path):
        path = self._write(tmp_path,
                           "task,x0,x1,y\n"
                           "a,1.0,2.0,3.0\n"
                           "b,0.5,0.5,1.0\n"
                           "a,0.0,1.0,2.0\n")
        rounds, n = load_csv(path, "task", ["x0", "x1"], "y")
        assert n == 2
        assert [r.active_task for r in rounds] == [0, 1, 0]
        np.testing.assert_array_equal(rounds[1].loss.features, [0.5, 0.5])
        assert rounds[2].loss.label == 2.0
        assert [r.t for r in rounds] == [0, 1, 2]

    def test_task_ids_densified_by_first_appearance(self, tmp_path):
        path = self._write(tmp_path,
                           "task,x,y\nz9,1,0\nalpha,2,0\nz9,3,0\nmid,4,0\n")
        rounds, n = load_csv(path, "task", ["x"], "y")
        assert n == 3
        assert [r.active_task for r in rounds] == [0, 1, 0, 2]

    def test_label_column_optional(self, tmp_path):
        path = self._write(tmp_path, "task,x\n0,1.5\n")
        rounds, _ = load_csv(path, "task", ["x"], None, loss_kind="linear")
        assert rounds[0].loss.label == 0.0

    def test_unknown_column(self, tmp_path):
        path = self._write(tmp_path, "task,x,y\n0,1,2\n")
        with pytest.raises(ValueError, match="unknown column"):
            load_csv(path, "task", ["x", "x9"], "y")

    def test_malformed_row_reports_line(self, tmp_path):
        path = self._write(tmp_path, "task,x,y\n0,1.0,2.0\n0,oops,2.0\n")
        with pytest.raises(ValueError, match=r"data\.csv:3: malformed row"):
            load_csv(path, "task", ["x"], "y")

    def test_empty_body(self, tmp_path):
        path = self._write(tmp_path, "task,x,y\n")
        with pytest.raises(ValueError, match="no rounds"):
            load_csv(path, "task", ["x"], "y")

    def test_missing_header(self, tmp_path):
        path = self._write(tmp_path, "")
        with pytest.raises(ValueError, match="no header"):
            load_csv(path, "task", ["x"], "y")


# ---------------------------------------------------------------------------
# batch comparator

class TestBatchComparator:
    def test_square_matches_least_squares_inside_the_ball(self):
        rng = np.random.default_rng(12)
        X = rng.normal(size=(40, 3))
        w_true = np.array([0.2, -0.1, 0.15])
        y = X @ w_true
        rounds = [Round(t, 0, LossInstance("square", X[t], float(y[t])))
                  for t in range(40)]
        w, val = batch_comparator(rounds, norm_ball(L2, 1.0))
        np.testing.assert_allclose(w, w_true, atol=1e-5)
        assert val == pytest.approx(0.0, abs=1e-9)

    def test_square_projection_binds(self):
        # unconstrained optimum has norm 2, ball radius 1: solution on boundary
        rounds = [Round(0, 0, LossInstance("square", np.array([1.0, 0.0]), 2.0)),
                  Round(1, 0, LossInstance("square", np.array([0.0, 1.0]), 0.0))]
        w, _ = batch_comparator(rounds, norm_ball(L2, 1.0))
        np.testing.assert_allclose(w, [1.0, 0.0], atol=1e-6)

    def test_linear_on_simplex_finds_a_vertex(self):
        g = np.array([0.3, -1.0, 0.5])
        rounds = [Round(0, 0, LossInstance("linear", g))]
        w, val = batch_comparator(rounds, simplex_set())
        np.testing.assert_allclose(w, [0.0, 1.0, 0.0], atol=1e-6)
        assert val == pytest.approx(-1.0, abs=1e-6)

    def test_logwealth_on_simplex(self):
        # one asset strictly dominates: all wealth goes there
        rounds = [Round(t, 0, LossInstance("logwealth", np.array([2.0, 1.0])))
                  for t in range(5)]
        w, val = batch_comparator(rounds, simplex_set())
        np.testing.assert_allclose(w, [1.0, 0.0], atol=1e-4)
        assert val == pytest.approx(-5.0 * math.log(2.0), abs=1e-3)

    def test_mixed_kinds_rejected(self):
        rounds = [Round(0, 0, LossInstance("linear", np.ones(2))),
                  Round(1, 0, LossInstance("square", np.ones(2), 1.0))]
        with pytest.raises(ValueError, match="mixed loss kinds"):
            batch_comparator(rounds, norm_ball(L2, 1.0))

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="at least one round"):
            batch_comparator([], norm_ball(L2, 1.0))


# ---------------------------------------------------------------------------
# Lipschitz estimates

class TestLipschitzBound:
    def test_square_with_prediction_cap(self):
        x = np.array([0.6, 0.8])
        rounds = [Round(0, 0, LossInstance("square", x, 0.5))]
        got = lipschitz_bound(rounds, L2, pred_norm_cap=2.0)
        assert got == pytest.approx(2.0 * (2.0 + 0.5) * 1.0, rel=1e-12)

    def test_square_simplex_uses_feature_max(self):
        x = np.array([0.25, 0.5])
        rounds = [Round(0, 0, LossInstance("square", x, 1.0))]
        got = lipschitz_bound(rounds, LINF, simplex_feasible=True)
        assert got == pytest.approx(2.0 * (0.5 + 1.0) * 0.5, rel=1e-12)

    def test_square_without_cap_rejected(self):
        rounds = [Round(0, 0, LossInstance("square", np.ones(2), 0.0))]
        with pytest.raises(ValueError, match="pred_norm_cap"):
            lipschitz_bound(rounds, L2)

    def test_logistic_is_feature_norm(self):
        rounds = [Round(0, 0, LossInstance("logistic", np.array([3.0, 4.0]), 1.0))]
        assert lipschitz_bound(rounds, L2) == pytest.approx(5.0)
        assert lipschitz_bound(rounds, L1) == pytest.approx(7.0)

    def test_logwealth_scales_by_min_feature(self):
        rounds = [Round(0, 0, LossInstance("logwealth", np.array([0.5, 2.0])))]
        assert lipschitz_bound(rounds, LINF) == pytest.approx(2.0 / 0.5)

    def test_linear_is_feature_norm(self):
        rounds = [Round(0, 0, LossInstance("linear", np.array([1.0, -2.0])))]
        assert lipschitz_bound(rounds, LINF) == pytest.approx(2.0)

    def test_floor_of_one(self):
        rounds = [Round(0, 0, LossInstance("linear", np.zeros(2)))]
        assert lipschitz_bound(rounds, L2) == 1.0
