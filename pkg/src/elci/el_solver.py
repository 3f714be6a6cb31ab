"""Linear min/max programs over an averaged Burg-entropy divergence ball.

The feasible set is the product of per-model probability simplices on the
data support, intersected with

    -2 * sum_i sum_j log(n_i * w_ij) <= chi2_{1, 1-alpha}.

Both programs are solved through their one-dimensional dual: for a scalar
multiplier ``beta`` each model's normalizing multiplier ``lambda_i`` solves
``sum_j 2 beta / (G_ij + lambda_i) = 1`` (safeguarded Newton), and
``beta`` itself is the root of the active divergence constraint
(bracketed root finding in ``log beta``). The optimal weights are then
``w_ij = 2 beta / (G_ij + lambda_i)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize, stats

from .core import ElSolution, ProbabilityWeights, SolverError


@dataclass(frozen=True)
class SolverConfig:
    newton_tol: float = 1e-12
    bisect_tol: float = 1e-12
    max_newton: int = 200
    max_bisect: int = 200

    def __post_init__(self):
        if self.newton_tol <= 0 or self.bisect_tol <= 0:
            raise ValueError("solver tolerances must be positive")


DEFAULT_CONFIG = SolverConfig()
_EPS = np.finfo(float).eps


def chi2_quantile(p: float) -> float:
    """``p``-quantile of the chi-square distribution with one degree of
    freedom."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"probability must lie in (0, 1), got {p}")
    return float(stats.chi2.ppf(p, df=1))


def normal_quantile(p: float) -> float:
    if not 0.0 < p < 1.0:
        raise ValueError(f"probability must lie in (0, 1), got {p}")
    return float(stats.norm.ppf(p))


def divergence(w) -> float:
    """``-2 * sum log(n_i w_ij)``; ``inf`` when some weight is zero."""
    total = 0.0
    for wi in w:
        wi = np.asarray(wi, dtype=float)
        if np.any(wi <= 0):
            return math.inf
        total += np.log(wi.size * wi).sum()
    return -2.0 * float(total)


def _envelope_roots(c: float):
    f = lambda x: math.log(x) + 1.0 + c / 2.0 - x
    lo = optimize.brentq(f, 1e-300, 1.0, xtol=1e-300, rtol=1e-15)
    hi = optimize.brentq(f, 1.0, 10.0 + c, xtol=1e-15, rtol=1e-15)
    return lo, hi


@dataclass(frozen=True)
class UncertaintySetSpec:
    """Divergence ball of level ``alpha`` over data sizes ``sizes``."""

    alpha: float
    sizes: tuple
    chi2: float = field(init=False)

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        object.__setattr__(self, "chi2", chi2_quantile(1.0 - self.alpha))

    @property
    def N(self) -> int:
        return sum(self.sizes)

    @property
    def radius(self) -> float:
        """Radius of the ball in averaged-divergence units."""
        return self.chi2 / (2.0 * self.N)

    def envelope(self):
        """Constants ``(l, u)`` with ``l/n_i <= w_ij <= u/n_i`` on the set.

        They are the two roots of ``x * exp(1 + chi2/2 - x) = 1``.
        """
        return _envelope_roots(self.chi2)

    def contains(self, w, tol: float = 1e-9) -> bool:
        if tuple(len(wi) for wi in w) != self.sizes:
            return False
        for wi in w:
            wi = np.asarray(wi)
            if np.any(wi < 0) or abs(wi.sum() - 1.0) > tol:
                return False
        return divergence(w) <= self.chi2 + tol


def _is_constant(g: np.ndarray) -> bool:
    spread = g.max() - g.min()
    return spread <= 1e-12 * (1.0 + np.abs(g).max())


class _Program:
    """Dual solver for ``min sum G_ij w_ij`` over the ball."""

    def __init__(self, coeffs: Sequence[np.ndarray], chi2: float,
                 config: SolverConfig):
        self.cfg = config
        self.chi2 = chi2
        self.sizes = np.array([g.size for g in coeffs])
        self.m = len(coeffs)
        self.gmin = np.array([g.min() for g in coeffs])
        # shifted coefficients, minimum zero per model
        self.gc = np.concatenate([g - g.min() for g in coeffs])
        self.seg = np.repeat(np.arange(self.m), self.sizes)
        self.gc_mean = np.bincount(self.seg, weights=self.gc) / self.sizes
        self.log2n = np.log(2.0 * self.sizes)[self.seg]
        self.D = float(max(g.max() - g.min() for g in coeffs))
        N = int(self.sizes.sum())
        # log of D / (2 (1 - exp(-chi2/(2N))) min_i n_i), overflow-safe
        self.log_beta_upper = (math.log(self.D) - math.log(2.0)
                               - math.log(-math.expm1(-chi2 / (2.0 * N)))
                               - math.log(self.sizes.min()))
        self.newton_iters = 0
        self._last = None

    def shifts(self, beta: float) -> np.ndarray:
        """Solve ``sum_j 2 beta / (gc_ij + s_i) = 1`` for every model.

        The left side is decreasing and convex in ``s_i`` on (0, inf); the
        root lies in ``[2 beta, 2 n_i beta]``. Newton starts from the
        previous solution rescaled to ``beta``, or on the first call from the
        large-``beta`` approximation ``2 n_i beta - mean_j gc_ij``, and runs
        on ``1 / F - 1``, which is exactly linear for a single point and
        close to linear otherwise. Steps leaving the current bracket fall
        back to bisection.
        """
        two_beta = 2.0 * beta
        lo = np.full(self.m, two_beta)
        hi = two_beta * self.sizes
        if self._last is None:
            s = np.maximum(hi - self.gc_mean, lo)
        else:
            # warm start: root-finding calls arrive at nearby beta
            b0, s0 = self._last
            s = np.clip(s0 * (beta / b0), lo, hi)
        seg, gc, m = self.seg, self.gc, self.m
        tol = self.cfg.newton_tol
        eps4 = 4 * _EPS
        for it in range(self.cfg.max_newton):
            inv = 1.0 / (gc + s[seg])
            F = two_beta * np.bincount(seg, weights=inv, minlength=m)
            f = F - 1.0
            if (np.abs(f) <= tol).all():
                break
            dF = -two_beta * np.bincount(seg, weights=inv * inv, minlength=m)
            pos = f > 0
            lo = np.where(pos, s, lo)
            hi = np.where(pos, hi, s)
            # Newton step for 1/F(s) - 1 = 0
            step = s - F * f / dF
            bad = ~((step > lo) & (step < hi))
            s = np.where(bad, 0.5 * (lo + hi), step)
            if (hi - lo <= eps4 * hi).all():
                break
        self.newton_iters += it + 1
        self._last = (beta, s)
        return s

    def residual(self, log_beta: float) -> float:
        beta = math.exp(log_beta)
        s = self.shifts(beta)
        logs = self.log2n + log_beta - np.log(self.gc + s[self.seg])
        return 2.0 * float(logs.sum()) + self.chi2

    def solve(self):
        cfg = self.cfg
        t_hi = self.log_beta_upper
        f_hi = self.residual(t_hi)
        t_lo, f_lo = t_hi - 1.0, self.residual(t_hi - 1.0)
        steps = 0
        while np.sign(f_lo) == np.sign(f_hi) and steps < cfg.max_bisect:
            t_hi, f_hi = t_lo, f_lo
            t_lo -= 2.0 ** min(steps, 6)
            f_lo = self.residual(t_lo)
            steps += 1
        if np.sign(f_lo) == np.sign(f_hi) or not np.isfinite(f_lo + f_hi):
            raise SolverError(
                "bracket failure: divergence residual has no sign change",
                {"log_beta_lo": t_lo, "log_beta_hi": t_hi,
                 "residual_lo": f_lo, "residual_hi": f_hi,
                 "log_beta_upper": self.log_beta_upper})
        try:
            t_star = optimize.brentq(self.residual, t_lo, t_hi,
                                     xtol=cfg.bisect_tol, rtol=8.9e-16,
                                     maxiter=cfg.max_bisect)
        except RuntimeError as exc:
            raise SolverError(str(exc), {"log_beta_lo": t_lo,
                                         "log_beta_hi": t_hi}) from exc
        beta = math.exp(t_star)
        s = self.shifts(beta)
        w = 2.0 * beta / (self.gc + s[self.seg])
        parts = np.split(w, np.cumsum(self.sizes)[:-1])
        parts = [p / p.sum() for p in parts]
        lambdas = s - self.gmin
        return parts, beta, lambdas


def solve_weights(coeffs: Sequence, alpha: float,
                  config: SolverConfig = DEFAULT_CONFIG) -> ElSolution:
    """Minimize and maximize ``sum_ij G_ij w_ij`` over the divergence ball.

    Parameters
    ----------
    coeffs : sequence of array_like
        ``coeffs[i]`` holds the ``n_i >= 2`` objective coefficients of input
        model ``i``.
    alpha : float
        The ball has radius ``chi2_{1,1-alpha}``.
    config : SolverConfig, optional

    Returns
    -------
    ElSolution

    Raises
    ------
    ValueError
        For non-finite coefficients or samples smaller than two.
    SolverError
        When the dual root cannot be bracketed.
    """
    G = [np.asarray(g, dtype=float).ravel() for g in coeffs]
    if not G:
        raise ValueError("need coefficients for at least one input model")
    for i, g in enumerate(G):
        if g.size < 2:
            raise ValueError(f"input model {i} needs at least 2 coefficients")
        if not np.all(np.isfinite(g)):
            raise ValueError(f"non-finite coefficient in input model {i}")
    chi2 = chi2_quantile(1.0 - alpha)
    sizes = [g.size for g in G]

    if all(_is_constant(g) for g in G):
        uni = ProbabilityWeights.uniform(sizes)
        val = float(sum(g.mean() for g in G))
        zeros = np.zeros(len(G))
        return ElSolution(uni, uni, val, val, 0.0, 0.0, zeros, zeros,
                          degenerate=True, chi2=chi2)

    lo_prog = _Program(G, chi2, config)
    w_lo, beta_lo, lam_lo = lo_prog.solve()
    hi_prog = _Program([-g for g in G], chi2, config)
    w_hi, beta_hi, lam_hi = hi_prog.solve()

    obj_lo = float(sum(g @ w for g, w in zip(G, w_lo)))
    obj_hi = float(sum(g @ w for g, w in zip(G, w_hi)))
    # both are optimal over a set containing the other's solution
    if obj_lo > obj_hi:
        obj_lo = obj_hi = 0.5 * (obj_lo + obj_hi)
    return ElSolution(ProbabilityWeights(w_lo), ProbabilityWeights(w_hi),
                      obj_lo, obj_hi, beta_lo, beta_hi, lam_lo, lam_hi,
                      degenerate=False, chi2=chi2,
                      beta_upper=math.exp(lo_prog.log_beta_upper))


def sum_of_means_ci(samples: Sequence, alpha: float,
                    config: SolverConfig = DEFAULT_CONFIG):
    """Confidence bounds for the sum of the means of independent samples.

    Returns ``(mu_lo, mu_hi)``, the extreme values of the weighted sum of
    sample means over the divergence ball.
    """
    sol = solve_weights(samples, alpha, config)
    return sol.obj_min, sol.obj_max
