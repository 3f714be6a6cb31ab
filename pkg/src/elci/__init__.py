"""Empirical-likelihood confidence intervals for simulation outputs under
nonparametric input uncertainty."""

__version__ = "0.1.0"

from .core import (BudgetPlan, ConfidenceInterval, ElSolution, InputDataset,
                   PerformanceModel, ProbabilityWeights, SolverError,
                   ValidationError, validate)
from .sampling import StreamKey, derive_stream, simulate
from .influence import estimate_influence, input_variance
from .el_solver import (SolverConfig, UncertaintySetSpec, chi2_quantile,
                        divergence, solve_weights, sum_of_means_ci)
from .ci_methods import (bel, eel, el_interval, fel, delta_method,
                         linearized_el, percentile_bootstrap, run_pipeline)
from .models import (DagSpec, TrueInputSpec, builtin_specs, get_preset,
                     load_dag, mm1_waiting_time, san)
from .experiments import (ExperimentConfig, MethodRow, emit_table,
                          estimate_truth, load_config, run_experiment)

__all__ = [
    "BudgetPlan", "ConfidenceInterval", "ElSolution", "InputDataset",
    "PerformanceModel", "ProbabilityWeights", "SolverError",
    "ValidationError", "validate", "StreamKey", "derive_stream", "simulate",
    "estimate_influence", "input_variance", "SolverConfig",
    "UncertaintySetSpec", "chi2_quantile", "divergence", "solve_weights",
    "sum_of_means_ci", "bel", "eel", "el_interval", "fel", "delta_method",
    "linearized_el", "percentile_bootstrap", "run_pipeline", "DagSpec",
    "TrueInputSpec", "builtin_specs", "get_preset", "load_dag",
    "mm1_waiting_time", "san", "ExperimentConfig", "MethodRow", "emit_table",
    "estimate_truth", "load_config", "run_experiment",
]
