"""Regenerate the frozen oracle values in tests/data/.

Run from the tests directory: ``python3 make_oracle_fixtures.py``. The
package solver is not used; values come from the grid and conic oracles.
"""
import json
import time

import numpy as np

from oracles import (boundary_grid_extremes, chi2_quantile_bisect,
                     cvxpy_extremes)

SEED = 4242


def instances(count=100):
    rng = np.random.default_rng(SEED)
    out = []
    for _ in range(count):
        m = int(rng.integers(1, 4))
        sizes = rng.integers(2, 5, size=m)
        coeffs = [np.round(rng.normal(0, 1, n) * rng.choice([0.1, 1, 10]), 6)
                  for n in sizes]
        alpha = float(rng.choice([0.01, 0.05, 0.1, 0.2]))
        out.append(([c.tolist() for c in coeffs], alpha))
    return out


def main():
    rows = []
    t0 = time.time()
    for coeffs, alpha in instances():
        chi2 = chi2_quantile_bisect(1 - alpha)
        D = sum(len(c) - 1 for c in coeffs)
        conic = cvxpy_extremes(coeffs, chi2)
        row = {"coeffs": coeffs, "alpha": alpha, "free_dims": D,
               "conic": list(conic)}
        if D <= 3:
            grid = boundary_grid_extremes(coeffs, chi2)
            row["grid"] = list(grid)
            assert max(abs(a - b) for a, b in zip(grid, conic)) < 1e-6, row
        row["oracle"] = row.get("grid", row["conic"])
        rows.append(row)
    with open("data/solver_oracle.json", "w") as fh:
        json.dump({"seed": SEED, "instances": rows}, fh, indent=1)
    print(f"{len(rows)} instances, "
          f"{sum('grid' in r for r in rows)} with grid oracle, "
          f"{time.time() - t0:.1f}s")


if __name__ == "__main__":
    main()
