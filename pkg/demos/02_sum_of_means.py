"""Empirical-likelihood bounds for a sum of means versus the normal
interval, on two Gaussian samples."""
import numpy as np

from elci import sum_of_means_ci
from elci.el_solver import normal_quantile

rng = np.random.default_rng(3)
y1 = rng.normal(1.0, 1.0, 200)
y2 = rng.normal(-2.0, 2.0, 200)

lo, hi = sum_of_means_ci([y1, y2], 0.05)
z = normal_quantile(0.975)
centre = y1.mean() + y2.mean()
half = z * np.sqrt(y1.var(ddof=1) / 200 + y2.var(ddof=1) / 200)

print(f"EL     : [{lo:.4f}, {hi:.4f}]")
print(f"normal : [{centre - half:.4f}, {centre + half:.4f}]")
print("true sum: -1.0")

# skewed data pulls the EL interval away from symmetry
e = rng.exponential(1.0, 40)
lo, hi = sum_of_means_ci([e], 0.05)
print(f"\nexponential n=40, mean {e.mean():.3f}: [{lo:.3f}, {hi:.3f}]")
print("left/right half-lengths:", round(e.mean() - lo, 3), round(hi - e.mean(), 3))
