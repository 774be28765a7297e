"""Multitask online mirror descent: shared updates across tasks through an
interaction matrix, with closed-form Euclidean and entropic learners, a
generic proximal fallback, and a regret-measuring experiment harness.
"""

from importlib import metadata

try:
    __version__ = metadata.version("mtomd")
except metadata.PackageNotFoundError:
    __version__ = "0.0.0"

from .compound import CompoundVector, as_matrix
from .environment import (LossInstance, Round, ScheduleSpec, SimplexTaskSpec,
                          SyntheticTaskSpec, batch_comparator, lipschitz_bound,
                          load_csv, loss_subgradient, loss_value,
                          make_lower_bound_instance, make_lower_bound_rounds,
                          make_schedule, make_synthetic, make_synthetic_simplex)
from .geometry import (L1, L2, LINF, NormTag, Regularizer, bregman, compound_bregman,
                       dual_norm_tag, lp, mirror_grad, norm, psi_value)
from .harness import (ConfigError, RegretReport, RunConfig, emit_report, load_config,
                      run_experiment, sweep, validate_config)
from .interaction import (GraphSpec, InteractionOperator, apply_block, clique_graph,
                          clique_operator, laplacian_operator, load_graph,
                          sqrt_block_action)
from .learners import (FeasibleSet, GenericMTOMD, IndependentEG, IndependentOGD,
                       InnerSolverError, LearnerConfig, MultitaskEG, MultitaskOGD,
                       RateSchedule, adaptive_rate, adaptive_schedule, constant_rate,
                       mahalanobis_ball, mahalanobis_radius, norm_ball,
                       p_star_norm_choice, project_simplex, resolve_rate, simplex_set,
                       theory_bound, theory_rate_eg, theory_rate_ogd, theory_rate_pnorm)
from .selftest import run_selftest
from .variance import (VarianceSpec, admissible_b_simplex, in_comparator_set,
                       local_norm_variance, local_simplex_variance, norm_variance,
                       simplex_variance)

__all__ = [
    "CompoundVector", "as_matrix",
    "NormTag", "L1", "L2", "LINF", "lp", "norm", "dual_norm_tag",
    "Regularizer", "psi_value", "mirror_grad", "bregman", "compound_bregman",
    "GraphSpec", "clique_graph", "InteractionOperator", "clique_operator",
    "laplacian_operator", "apply_block", "sqrt_block_action", "load_graph",
    "norm_variance", "simplex_variance", "local_norm_variance",
    "local_simplex_variance", "admissible_b_simplex", "VarianceSpec",
    "in_comparator_set",
    "FeasibleSet", "norm_ball", "simplex_set", "mahalanobis_ball",
    "mahalanobis_radius", "project_simplex",
    "RateSchedule", "constant_rate", "adaptive_schedule", "adaptive_rate",
    "resolve_rate", "theory_rate_ogd", "theory_rate_pnorm", "theory_rate_eg",
    "p_star_norm_choice", "theory_bound",
    "LearnerConfig", "MultitaskOGD", "MultitaskEG", "IndependentOGD",
    "IndependentEG", "GenericMTOMD", "InnerSolverError",
    "LossInstance", "Round", "loss_value", "loss_subgradient",
    "ScheduleSpec", "make_schedule", "SyntheticTaskSpec", "make_synthetic",
    "SimplexTaskSpec", "make_synthetic_simplex", "make_lower_bound_instance",
    "make_lower_bound_rounds", "load_csv", "batch_comparator", "lipschitz_bound",
    "RunConfig", "RegretReport", "ConfigError", "run_experiment", "sweep",
    "emit_report", "load_config", "validate_config",
    "run_selftest",
    "__version__",
]
