"""Extreme weighted means over the divergence ball.

Two points {0, 1} have a closed-form answer, so the printed extremes can
be checked by hand. Then a two-model problem, where the solver also reports its dual variables.
"""
import numpy as np

from elci import solve_weights
from elci.el_solver import chi2_quantile, divergence

sol = solve_weights([[0.0, 1.0]], alpha=0.10)
print("chi2(0.90)       :", chi2_quantile(0.90))
print("min / max        :", sol.obj_min, sol.obj_max)
print("weights at min   :", sol.w_min[0])

G = [np.array([0.0, 1.0, 2.0]), np.array([10.0, 12.0])]
sol = solve_weights(G, alpha=0.05)
print()
print("two models, min  :", sol.obj_min, " max:", sol.obj_max)
print("beta_min/max     :", sol.beta_min, sol.beta_max)
print("lambda_min       :", sol.lambdas_min)
print("divergence at min:", divergence(list(sol.w_min)), "target", sol.chi2)

# constant coefficients collapse the problem
print()
print("constant G       :", solve_weights([[3.0, 3.0, 3.0]], 0.05).degenerate)
