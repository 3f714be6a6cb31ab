"""All interval methods on the packaged M/M/1 sample, with the same
budget of 2000 simulation runs per interval."""
from elci import (bel, delta_method, eel, fel, linearized_el,
                  mm1_waiting_time, percentile_bootstrap, run_pipeline)
from elci.cli import data_dir, read_dataset
from elci.models import PINNED_TRUTHS

model = mm1_waiting_time()
ds = read_dataset(data_dir() / "samples" / "mm1", 2)
truth = PINNED_TRUTHS["mm1"][0]

# one pipeline feeds every EL variant
state = run_pipeline(model, ds, 0.05, 1900, 50, seed=1)
cis = [f(state) for f in (bel, eel, fel, linearized_el)]
cis.append(percentile_bootstrap(model, ds, 0.05, 50, 40, seed=1))
cis.append(delta_method(model, ds, 0.05, 2000, seed=1))

print(f"truth {truth:.4f}")
for ci in cis:
    print(f"{ci.method:5s} [{ci.lower:7.4f}, {ci.upper:7.4f}]  "
          f"len {ci.length:.3f}  covers {ci.contains(truth)}")
