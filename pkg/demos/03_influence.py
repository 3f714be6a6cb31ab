"""Influence estimates for the M/M/1 waiting-time model.

The scores of each input model sum to zero, and points with long service
times get large positive influence.
"""
import numpy as np

from elci import StreamKey, estimate_influence, mm1_waiting_time
from elci.cli import data_dir, read_dataset
from elci.influence import input_variance

ds = read_dataset(data_dir() / "samples" / "mm1", 2)
est = estimate_influence(mm1_waiting_time(), ds, 1900, StreamKey(11))

print("z_hat       :", est.z_hat)
print("sigma^2_hat :", est.sigma2_hat)
for i, g in enumerate(est.g_hats):
    print(f"model {i + 1}: n={g.size} sum={g.sum():+.2e} "
          f"range=[{g.min():.2f}, {g.max():.2f}]")

service = np.asarray(ds.samples[1]).ravel()
order = np.argsort(service)
print("shortest services:", np.round(service[order[:3]], 3),
      "scores", np.round(est.g_hats[1][order[:3]], 2))
print("longest services :", np.round(service[order[-3:]], 3),
      "scores", np.round(est.g_hats[1][order[-3:]], 2))
print("input variance   :", input_variance(est, ds))
