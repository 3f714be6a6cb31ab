"""Confidence intervals under input uncertainty.

The three empirical-likelihood variants share one pipeline execution:
influence estimation, the min/max weight programs, and two independent
evaluation batches under the optimal weights. ``bel``, ``eel``, ``fel``
and ``linearized_el`` are pure functions of that state, so intervals
built from the same state are nested.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (ConfidenceInterval, ElSolution, InputDataset,
                   PerformanceModel, ValidationError, validate)
from .el_solver import normal_quantile, solve_weights
from .influence import InfluenceEstimate, estimate_influence, input_variance
from .sampling import as_key, derive_stream, evaluate_draws, simulate


@dataclass(frozen=True)
class EvaluationStats:
    mean: float
    var: float
    R2: int


@dataclass(frozen=True)
class ElPipelineState:
    influence: InfluenceEstimate
    solution: ElSolution
    sigma_I2: float
    step3_min: EvaluationStats
    step3_max: EvaluationStats
    alpha: float

    @property
    def sigma_I(self) -> float:
        return math.sqrt(self.sigma_I2)

    def diagnostics(self) -> dict:
        return {
            "z_hat": self.influence.z_hat,
            "sigma_hat": math.sqrt(self.influence.sigma2_hat),
            "sigma_I": self.sigma_I,
            "R1": self.influence.R1,
            "R2": self.step3_min.R2,
            "z_min": self.step3_min.mean,
            "z_max": self.step3_max.mean,
            "degenerate": self.solution.degenerate,
        }


def _evaluate(model, dataset, weights, R2, key) -> EvaluationStats:
    out = simulate(model, dataset, weights, R2, derive_stream(key))
    return EvaluationStats(float(out.mean()), float(out.var(ddof=1)), R2)


def run_pipeline(model: PerformanceModel, dataset: InputDataset,
                 alpha: float, R1: int, R2: int, seed) -> ElPipelineState:
    """Execute the shared steps of the empirical-likelihood procedures.

    Parameters
    ----------
    model, dataset
        Simulation model and the observed input data.
    alpha : float
        One minus the nominal confidence level.
    R1, R2 : int
        Replications for influence estimation and for each of the two
        evaluation batches. Both must be at least 2.
    seed : int or StreamKey
        Root of the three independent streams used.
    """
    validate(dataset, model)
    if R1 < 2 or R2 < 2:
        raise ValidationError("R1 and R2 must both be at least 2")
    key = as_key(seed)
    infl = estimate_influence(model, dataset, R1, key.child("step1"))
    sol = solve_weights(infl.g_hats, alpha)
    s_min = _evaluate(model, dataset, sol.w_min, R2, key.child("step3_min"))
    s_max = _evaluate(model, dataset, sol.w_max, R2, key.child("step3_max"))
    return ElPipelineState(infl, sol, input_variance(infl, dataset),
                           s_min, s_max, alpha)


def _ci(lower, upper, state, method, alpha=None) -> ConfidenceInterval:
    diag = state.diagnostics()
    diag["raw_lower"], diag["raw_upper"] = float(lower), float(upper)
    diag["crossed"] = bool(lower > upper)
    if lower > upper:
        # evaluation noise put the bounds in the wrong order; the interval
        # collapses to a point and is scored as covering nothing
        lower = upper = 0.5 * (lower + upper)
    level = 1.0 - (state.alpha if alpha is None else alpha)
    return ConfidenceInterval(float(lower), float(upper), level, method, diag)


def bel(state: ElPipelineState) -> ConfidenceInterval:
    """Plain averages of the two evaluation batches."""
    return _ci(state.step3_min.mean, state.step3_max.mean, state, "BEL")


def _z(state, alpha):
    return normal_quantile(1.0 - (state.alpha if alpha is None else alpha) / 2)


def eel(state: ElPipelineState, alpha=None) -> ConfidenceInterval:
    """Evaluation batches widened by their own normal standard errors."""
    z = _z(state, alpha)
    lo, hi = state.step3_min, state.step3_max
    return _ci(lo.mean - z * math.sqrt(lo.var / lo.R2),
               hi.mean + z * math.sqrt(hi.var / hi.R2), state, "EEL", alpha)


def fel(state: ElPipelineState, alpha=None) -> ConfidenceInterval:
    """Evaluation batches widened by the excess of the combined input and
    evaluation standard error over the input standard error."""
    z = _z(state, alpha)
    sI2, sI = state.sigma_I2, state.sigma_I
    lo, hi = state.step3_min, state.step3_max
    adj_lo = math.sqrt(sI2 + lo.var / lo.R2) - sI
    adj_hi = math.sqrt(sI2 + hi.var / hi.R2) - sI
    return _ci(lo.mean - z * adj_lo, hi.mean + z * adj_hi, state, "FEL", alpha)


def linearized_el(state: ElPipelineState) -> ConfidenceInterval:
    """Plug the optimal weights into the sampled linear approximation
    instead of re-simulating."""
    z_hat = state.influence.z_hat
    sol = state.solution
    return _ci(z_hat + sol.obj_min, z_hat + sol.obj_max, state, "LEL")


def _rank(q: float, B: int) -> int:
    return int(math.floor(q * (B + 1) + 0.5))


def bootstrap_ranks(alpha: float, B: int):
    """1-based order-statistic ranks of the percentile interval.

    Raises
    ------
    ValidationError
        If ``B`` is too small for the ranks to fall inside ``1..B``.
    """
    k_lo, k_hi = _rank(alpha / 2, B), _rank(1 - alpha / 2, B)
    if B < 3 or k_lo < 1 or k_hi > B:
        b_min = max(B, 3)
        while _rank(alpha / 2, b_min) < 1 or _rank(1 - alpha / 2, b_min) > b_min:
            b_min += 1
        raise ValidationError(
            f"B too small for requested level: B={B} at alpha={alpha} "
            f"needs B >= {b_min}")
    return k_lo, k_hi


def percentile_bootstrap(model: PerformanceModel, dataset: InputDataset,
                         alpha: float, B: int, R_b: int,
                         seed) -> ConfidenceInterval:
    """Standard percentile bootstrap with ``R_b`` runs per resample."""
    validate(dataset, model)
    if R_b < 1:
        raise ValidationError("R_b must be at least 1")
    k_lo, k_hi = bootstrap_ranks(alpha, B)
    key = as_key(seed)
    resample_rng = derive_stream(key.child("resample"))
    sim_rng = derive_stream(key.child("simulate"))
    draws = []
    for i, n in enumerate(dataset.sizes):
        # resample l is a multiset of n indices; runs draw uniformly from it
        res = resample_rng.integers(0, n, size=(B, n))
        pick = sim_rng.integers(0, n, size=(B, R_b, model.run_lengths[i]))
        idx = res[np.arange(B)[:, None, None], pick]
        draws.append(idx.reshape(B * R_b, -1))
    out = evaluate_draws(model, dataset, draws).reshape(B, R_b)
    z_l = np.sort(out.mean(axis=1))
    ci = ConfidenceInterval(float(z_l[k_lo - 1]), float(z_l[k_hi - 1]),
                            1.0 - alpha, "BOOT",
                            {"B": B, "R_b": R_b, "rank_lo": k_lo,
                             "rank_hi": k_hi,
                             "rank_rule": "floor(q*(B+1)+1/2)"})
    return ci


def delta_method(model: PerformanceModel, dataset: InputDataset,
                 alpha: float, R_d: int, seed) -> ConfidenceInterval:
    """Normal interval around the plug-in estimate with stochastic and
    bias-corrected input variance."""
    if R_d < 2:
        raise ValidationError("R_d must be at least 2")
    key = as_key(seed)
    infl = estimate_influence(model, dataset, R_d, key.child("step1"))
    sI2 = input_variance(infl, dataset)
    se = math.sqrt(infl.sigma2_hat / R_d + sI2)
    z = normal_quantile(1.0 - alpha / 2)
    return ConfidenceInterval(infl.z_hat - z * se, infl.z_hat + z * se,
                              1.0 - alpha, "DELTA",
                              {"z_hat": infl.z_hat,
                               "sigma_hat": math.sqrt(infl.sigma2_hat),
                               "sigma_I": math.sqrt(sI2), "R_d": R_d})


EL_VARIANTS = {"bel": bel, "eel": eel, "fel": fel, "lel": linearized_el}


def el_interval(method: str, state: ElPipelineState) -> ConfidenceInterval:
    fn = EL_VARIANTS[method.lower()]
    return fn(state)
