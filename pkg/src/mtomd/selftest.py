"""Condensed invariant suites behind the `selftest` CLI subcommand.

Each suite prints one PASS/FAIL line: closed forms against an
eigendecomposition oracle, stochasticity of inverse operators, the
transformed-norm variance identity, equivalence with independent learners
at A = I, finite-difference gradient checks, and agreement between the
generic inner solver and the closed-form updates.
"""

from __future__ import annotations

import numpy as np

from .compound import CompoundVector
from .environment import LossInstance, loss_subgradient, loss_value
from .geometry import (L2, compound_bregman, euclidean, mirror_grad, negentropy,
                       pnorm as pnorm_reg, psi_value)
from .interaction import GraphSpec, clique_operator, laplacian_operator, sqrt_block_action
from .learners import (GenericMTOMD, IndependentEG, IndependentOGD, LearnerConfig,
                       MultitaskEG, MultitaskOGD, constant_rate, mahalanobis_ball,
                       mahalanobis_radius, norm_ball, simplex_set)
from .variance import VarianceSpec, norm_variance


def _euclid_config(op, feasible, eta):
    return LearnerConfig(euclidean(), op, feasible, constant_rate(eta),
                         VarianceSpec("norm", 0.0, diameter=1.0))


def _entropic_config(op, eta):
    return LearnerConfig(negentropy(), op, simplex_set(), constant_rate(eta),
                         VarianceSpec("simplex", 0.0))


def _closed_forms():
    for N in (1, 2, 4, 8, 16):
        for b in (0.0, 0.5, 1.0, float(N), 10.0 * N):
            op = clique_operator(N, b)
            A = (1.0 + b) * np.eye(N) - b * np.ones((N, N)) / N
            vals, vecs = np.linalg.eigh(A)
            for got, expo in ((op.matrix, 1.0), (op.sqrt, 0.5),
                              (op.inv, -1.0), (op.inv_sqrt, -0.5)):
                want = (vecs * vals ** expo) @ vecs.T
                err = float(np.linalg.norm(got - want))
                assert err <= 1e-9, f"N={N} b={b} expo={expo}: Frobenius error {err:.3e}"
            exact = (b + N) / ((1.0 + b) * N)
            assert op.max_inv_diag == exact, f"max_inv_diag not closed-form at N={N} b={b}"
            num = float(np.diag(np.linalg.inv(A)).max())
            assert abs(op.max_inv_diag - num) <= 1e-10


def _stochasticity():
    rng = np.random.default_rng(7)
    for _ in range(25):
        N = int(rng.integers(2, 11))
        W = rng.uniform(0.0, 1.0, (N, N)) * (rng.random((N, N)) < 0.6)
        W = np.triu(W, 1)
        W = W + W.T
        op = laplacian_operator(GraphSpec(N, W))
        for M in (op.inv, op.inv_sqrt):
            assert M.min() >= -1e-12, f"negative entry {M.min():.3e}"
            assert np.abs(M.sum(axis=1) - 1.0).max() <= 1e-10


def _bregman_identity():
    rng = np.random.default_rng(11)
    reg = euclidean()
    for _ in range(200):
        N = int(rng.integers(1, 7))
        d = int(rng.integers(1, 6))
        b = float(rng.uniform(0.0, 20.0))
        u = CompoundVector(rng.normal(size=(N, d)))
        lhs = 2.0 * compound_bregman(reg, sqrt_block_action(b, u), np.zeros((N, d)))
        rhs = float((u.data ** 2).sum()) + b * (N - 1) * norm_variance(u)
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs)), f"{lhs} vs {rhs}"


def _identity_equivalence():
    rng = np.random.default_rng(23)
    N, d, T = 3, 4, 300
    op0 = clique_operator(N, 0.0)
    planted = 0.3 * rng.normal(size=(N, d))
    planted /= max(np.linalg.norm(planted, axis=1).max() / 0.3, 1.0)

    mt = MultitaskOGD(_euclid_config(op0, mahalanobis_ball(mahalanobis_radius(0, 0, N, 1.0)),
                                     0.01), d)
    ind = IndependentOGD(_euclid_config(op0, norm_ball(L2, 1.0), 0.01), d)
    for t in range(T):
        i = t % N
        x_mt, x_ind = mt.predict(i), ind.predict(i)
        gap = float(np.abs(x_mt - x_ind).max())
        assert gap <= 1e-12, f"OGD predictions diverge by {gap:.3e} at t={t}"
        feat = rng.normal(size=d)
        feat /= np.linalg.norm(feat)
        inst = LossInstance("square", feat, float(planted[i] @ feat))
        g = loss_subgradient(inst, x_mt)
        mt.step(i, g)
        ind.step(i, g)
    assert float(np.linalg.norm(mt.iterate().data, axis=1).max()) < 0.9, \
        "iterates grew enough to trigger projections; comparison void"

    mt_eg = MultitaskEG(_entropic_config(op0, 0.05), d)
    ind_eg = IndependentEG(_entropic_config(op0, 0.05), d)
    for t in range(T):
        i = t % N
        x_mt, x_ind = mt_eg.predict(i), ind_eg.predict(i)
        gap = float(np.abs(x_mt - x_ind).max())
        assert gap <= 1e-12, f"EG predictions diverge by {gap:.3e} at t={t}"
        g = 0.5 * rng.normal(size=d)
        mt_eg.step(i, g)
        ind_eg.step(i, g)


def _gradient_checks():
    rng = np.random.default_rng(31)
    h = 1e-6

    def fd(f, x):
        out = np.empty_like(x)
        for j in range(x.size):
            e = np.zeros_like(x)
            e[j] = h
            out[j] = (f(x + e) - f(x - e)) / (2.0 * h)
        return out

    for reg in (euclidean(), pnorm_reg(1.3), negentropy()):
        for _ in range(10):
            if reg.kind == "negentropy":
                # coordinate bumps leave the simplex, so check directional
                # derivatives along e_i - e_j instead
                x = rng.dirichlet(3.0 * np.ones(5))
                x = 0.9 * x + 0.1 / 5
                got = mirror_grad(reg, x)
                errs = []
                for j in range(1, x.size):
                    d = np.zeros_like(x)
                    d[0], d[j] = h, -h
                    want = (psi_value(reg, x + d) - psi_value(reg, x - d)) / (2.0 * h)
                    errs.append(abs((got[0] - got[j]) - want) / max(1.0, abs(want)))
                err = max(errs)
            else:
                x = rng.normal(size=5)
                x[np.abs(x) < 0.05] = 0.1
                got = mirror_grad(reg, x)
                want = fd(lambda z: psi_value(reg, z), x)
                err = float(np.abs(got - want).max()) / max(1.0, float(np.abs(want).max()))
            assert err <= 1e-6, f"{reg.kind}: mirror_grad off by rel {err:.3e}"

    for kind in ("square", "logistic", "logwealth", "linear"):
        for _ in range(10):
            feat = rng.uniform(0.5, 1.5, size=4) if kind == "logwealth" else rng.normal(size=4)
            label = float(rng.choice([-1.0, 1.0])) if kind == "logistic" else float(rng.normal())
            inst = LossInstance(kind, feat, label)
            w = rng.uniform(0.2, 0.5, size=4) if kind == "logwealth" else rng.normal(size=4)
            got = loss_subgradient(inst, w)
            want = fd(lambda z: loss_value(inst, z), w)
            err = float(np.abs(got - want).max()) / max(1.0, float(np.abs(want).max()))
            assert err <= 1e-6, f"{kind}: subgradient off by rel {err:.3e}"


def _generic_agreement():
    rng = np.random.default_rng(43)
    N, d = 3, 3

    op = clique_operator(N, 1.7)
    feas = mahalanobis_ball(mahalanobis_radius(1.7, 0.2, N, 1.0))
    closed = MultitaskOGD(_replace_sigma(_euclid_config(op, feas, 0.05), 0.2), d)
    generic = GenericMTOMD(_replace_sigma(_euclid_config(op, feas, 0.05), 0.2), d)
    for t in range(10):
        i = int(rng.integers(N))
        g = rng.normal(size=d)
        closed.step(i, g)
        generic.step(i, g)
        gap = float(np.abs(closed.iterate().data - generic.iterate().data).max())
        assert gap <= 1e-6, f"OGD generic gap {gap:.3e} at step {t}"

    op0 = clique_operator(N, 0.0)
    closed_eg = MultitaskEG(_entropic_config(op0, 0.1), d)
    generic_eg = GenericMTOMD(_entropic_config(op0, 0.1), d)
    for t in range(10):
        i = int(rng.integers(N))
        g = 0.5 * rng.normal(size=d)
        closed_eg.step(i, g)
        generic_eg.step(i, g)
        gap = float(np.abs(closed_eg.iterate().data - generic_eg.iterate().data).max())
        assert gap <= 1e-6, f"EG generic gap {gap:.3e} at step {t}"


def _replace_sigma(cfg: LearnerConfig, sigma: float) -> LearnerConfig:
    return LearnerConfig(cfg.regularizer, cfg.operator, cfg.feasible, cfg.rate,
                         VarianceSpec("norm", sigma, diameter=1.0), cfg.lipschitz)


SUITES = (
    ("clique closed forms vs eigendecomposition oracle", _closed_forms),
    ("inverse operators doubly stochastic on random graphs", _stochasticity),
    ("transformed-norm variance identity", _bregman_identity),
    ("identity-interaction equivalence with independent learners", _identity_equivalence),
    ("finite-difference gradient checks", _gradient_checks),
    ("generic inner solver matches closed-form updates", _generic_agreement),
)


def run_selftest(printer=print) -> bool:
    ok = True
    for name, fn in SUITES:
        try:
            fn()
        except Exception as exc:
            ok = False
            printer(f"FAIL {name}: {exc}")
        else:
            printer(f"PASS {name}")
    return ok
