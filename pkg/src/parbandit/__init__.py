"""Parallel contextual linear bandits with covariance-stability doubling checks."""

__version__ = "0.1.0"

from .confidence import ConfidenceSet, ProblemScales, RegressionSums, beta_radius, ridge_estimate  # noqa: E402
from .environments import Environment, LinearOracle, NeuralOracle, TabularOracle, load_tabular_csv  # noqa: E402
from .linalg import CovarianceState, make_regularized, psd_dominates, rank1_update  # noqa: E402
from .metrics import RegretLedger, aggregate_trials  # noqa: E402
from .policies import PolicyConfig, PolicyKind, initial_state, observe_batch, select_batch  # noqa: E402
from .runner import ExperimentConfig, parse_config, run_experiment, seed_stream  # noqa: E402

__all__ = [
    "__version__",
    "ConfidenceSet",
    "ProblemScales",
    "RegressionSums",
    "beta_radius",
    "ridge_estimate",
    "Environment",
    "LinearOracle",
    "NeuralOracle",
    "TabularOracle",
    "load_tabular_csv",
    "CovarianceState",
    "make_regularized",
    "psd_dominates",
    "rank1_update",
    "RegretLedger",
    "aggregate_trials",
    "PolicyConfig",
    "PolicyKind",
    "initial_state",
    "observe_batch",
    "select_batch",
    "ExperimentConfig",
    "parse_config",
    "run_experiment",
    "seed_stream",
]
