"""Monte Carlo estimate of the empirical influence function.

Outputs generated under the uniform empirical distributions are
correlated with the centered occurrence counts of each data point. The
same replications give the output variance and, after a bias
correction, the input-induced variance.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import InputDataset, PerformanceModel, ProbabilityWeights, validate
from .sampling import derive_stream, draw_replication, evaluate_draws


@dataclass(frozen=True)
class InfluenceEstimate:
    g_hats: tuple
    z_hat: float
    sigma2_hat: float
    R1: int
    run_lengths: tuple = ()


def influence_from_draws(outputs: np.ndarray, draws, sizes, run_lengths):
    """Influence estimates from outputs and the index draws behind them.

    For model ``i`` the estimate at point ``j`` is the average over
    replications of ``(h_r - zbar) * (n_i * c_ijr - T_i)`` where
    ``c_ijr`` counts how often index ``j`` was drawn in replication ``r``.
    """
    h = np.asarray(outputs, dtype=float)
    R1 = h.size
    z_hat = float(h.mean())
    dev = h - z_hat
    dev_sum = dev.sum()
    g_hats = []
    for idx, n, T in zip(draws, sizes, run_lengths):
        # sum_r dev_r * c_ijr, by scattering dev_r onto each drawn index
        weighted = np.bincount(idx.ravel(), weights=np.repeat(dev, T),
                               minlength=n)
        g = (n * weighted - T * dev_sum) / R1
        g.setflags(write=False)
        g_hats.append(g)
    sigma2 = float(dev @ dev / (R1 - 1))
    return tuple(g_hats), z_hat, sigma2


def estimate_influence(model: PerformanceModel, dataset: InputDataset,
                       R1: int, stream) -> InfluenceEstimate:
    """Run ``R1`` uniform-weight replications and estimate the influence
    function at every data point.

    Parameters
    ----------
    model : PerformanceModel
    dataset : InputDataset
    R1 : int
        Number of replications, at least 2.
    stream : numpy.random.Generator or StreamKey

    Returns
    -------
    InfluenceEstimate
    """
    validate(dataset, model)
    if R1 < 2:
        raise ValueError("R1 must be at least 2")
    rng = stream if isinstance(stream, np.random.Generator) else derive_stream(stream)
    uniform = ProbabilityWeights.uniform(dataset.sizes)
    draws = draw_replication(uniform, model.run_lengths, rng, R1)
    h = evaluate_draws(model, dataset, draws)
    g_hats, z_hat, sigma2 = influence_from_draws(
        h, draws, dataset.sizes, model.run_lengths)
    return InfluenceEstimate(g_hats, z_hat, sigma2, int(R1),
                             tuple(model.run_lengths))


def input_variance(est: InfluenceEstimate, dataset: InputDataset) -> float:
    """Bias-corrected input-induced variance, floored at zero."""
    total = 0.0
    for g, n, T in zip(est.g_hats, dataset.sizes, est.run_lengths):
        total += (g @ g / n - n * T * est.sigma2_hat / est.R1) / n
    return max(total, 0.0)
