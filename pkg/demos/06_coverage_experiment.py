"""A small coverage experiment on the M/M/1 model.

The packaged configs reproduce the benchmark tables; here a short run of
the first one is printed. Raise the replication count for real numbers.
"""
from dataclasses import replace

from elci.cli import data_dir
from elci.experiments import load_config, run_experiment, table_text

cfg = load_config(data_dir() / "configs" / "table1.cfg")
cfg = replace(cfg, K=20)
rows = run_experiment(cfg, workers=2)
print(table_text(rows))
