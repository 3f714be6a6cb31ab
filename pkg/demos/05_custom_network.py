"""A stochastic activity network read from a text file, used as a tail
probability model."""
import tempfile
from pathlib import Path

import numpy as np

from elci import InputDataset, fel, run_pipeline, san
from elci.models import load_dag

text = """# diamond with a shortcut
nodes=4 source=1 sink=4
1 2 0
1 3 1
2 4 2
3 4 3
1 4 4
"""
path = Path(tempfile.mkdtemp()) / "diamond.txt"
path.write_text(text)
dag = load_dag(path)

rng = np.random.default_rng(5)
rates = [2.0, 1.0, 2.0, 1.0, 0.5]
ds = InputDataset([rng.exponential(1 / r, 60) for r in rates])

durations = np.ones((1, 5))
print("longest path, unit durations:", dag.longest_path(durations)[0])

model = san(dag, "tail_indicator", threshold=2.5)
state = run_pipeline(model, ds, 0.05, 4000, 200, seed=2)
ci = fel(state)
print(f"P(T > 2.5): point {state.influence.z_hat:.4f}, "
      f"FEL [{ci.lower:.4f}, {ci.upper:.4f}]")
print("overshoots [0, 1]:", ci.overshoots(model.natural_range))
