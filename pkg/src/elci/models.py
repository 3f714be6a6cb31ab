"""Built-in simulation models and the true input laws of the benchmark
experiments."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .core import InputDataset, PerformanceModel, ValidationError


# ---------------------------------------------------------------------------
# True input distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InputLaw:
    family: str
    params: tuple

    def sample(self, size, rng: np.random.Generator) -> np.ndarray:
        if self.family == "exponential":
            (rate,) = self.params
            return rng.exponential(1.0 / rate, size)
        raise ValueError(f"unsupported input law {self.family!r}")

    @property
    def mean(self) -> float:
        if self.family == "exponential":
            return 1.0 / self.params[0]
        raise ValueError(f"unsupported input law {self.family!r}")


@dataclass(frozen=True)
class TrueInputSpec:
    """Parametric laws used to draw synthetic data and ground truth."""

    laws: tuple

    def __post_init__(self):
        object.__setattr__(self, "laws", tuple(self.laws))
        for law in self.laws:
            if law.family == "exponential" and not law.params[0] > 0:
                raise ValidationError("exponential rates must be positive")

    @classmethod
    def exponential(cls, rates: Sequence[float]) -> "TrueInputSpec":
        return cls(tuple(InputLaw("exponential", (float(r),)) for r in rates))

    @property
    def m(self) -> int:
        return len(self.laws)

    def draw_dataset(self, sizes: Sequence[int], rng) -> InputDataset:
        if len(sizes) != self.m:
            raise ValidationError(
                f"{len(sizes)} data sizes given for {self.m} input models")
        return InputDataset([law.sample(n, rng)
                             for law, n in zip(self.laws, sizes)])

    def draw_inputs(self, run_lengths, R: int, rng) -> list:
        """Inputs for ``R`` replications under the true laws, shaped
        ``(R, T_i, 1)``."""
        return [law.sample((R, T, 1), rng)
                for law, T in zip(self.laws, run_lengths)]


# ---------------------------------------------------------------------------
# M/M/1 waiting time via the Lindley recursion
# ---------------------------------------------------------------------------

class _Lindley:
    def __init__(self, customers: int):
        self.customers = customers

    def __call__(self, interarrivals, services):
        A = interarrivals[..., 0]
        S = services[..., 0]
        if np.any(A < 0) or np.any(S < 0):
            raise ValueError("interarrival and service times must be >= 0")
        W = np.zeros(A.shape[0])
        for t in range(self.customers - 1):
            W = np.maximum(W + S[:, t] - A[:, t], 0.0)
        return W


def mm1_waiting_time(customers: int = 10) -> PerformanceModel:
    """Waiting time of customer ``customers`` in an initially empty
    single-server FIFO queue.

    Input model 0 supplies interarrival times, input model 1 service
    times; each run consumes ``customers - 1`` of both.
    """
    T = customers - 1
    return PerformanceModel(_Lindley(customers), (T, T),
                            natural_range=(0.0, np.inf), vectorized=True,
                            dims=(1, 1), name="mm1")


# ---------------------------------------------------------------------------
# Stochastic activity networks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DagSpec:
    """Directed acyclic network whose edge ``k`` has the length supplied
    by input model ``edges[k][2]``. Nodes are numbered ``1..nodes``."""

    nodes: int
    edges: tuple
    source: int
    sink: int

    def __post_init__(self):
        edges = tuple((int(a), int(b), int(k)) for a, b, k in self.edges)
        object.__setattr__(self, "edges", edges)
        for a, b, k in edges:
            if not (1 <= a <= self.nodes and 1 <= b <= self.nodes):
                raise ValidationError(f"edge {a}->{b} uses an unknown node")
            if k < 0:
                raise ValidationError(f"edge {a}->{b} has invalid model index")
        order = self.topological_order()
        reach = {self.source}
        for v in order:
            if v in reach:
                reach.update(b for a, b, _ in edges if a == v)
        if self.sink not in reach:
            raise ValidationError(
                f"sink {self.sink} is unreachable from source {self.source}")

    @property
    def m(self) -> int:
        return max(k for _, _, k in self.edges) + 1

    def topological_order(self) -> list:
        indeg = {v: 0 for v in range(1, self.nodes + 1)}
        for _, b, _ in self.edges:
            indeg[b] += 1
        ready = sorted(v for v, d in indeg.items() if d == 0)
        order = []
        while ready:
            v = ready.pop(0)
            order.append(v)
            for a, b, _ in self.edges:
                if a == v:
                    indeg[b] -= 1
                    if indeg[b] == 0:
                        ready.append(b)
        if len(order) != self.nodes:
            raise ValidationError("network contains a cycle")
        return order

    def longest_path(self, lengths: np.ndarray) -> np.ndarray:
        """Longest source-to-sink path for each row of ``lengths``
        (shape ``(R, m)``)."""
        lengths = np.atleast_2d(lengths)
        R = lengths.shape[0]
        dist = {v: np.full(R, -np.inf) for v in range(1, self.nodes + 1)}
        dist[self.source] = np.zeros(R)
        for v in self.topological_order():
            for a, b, k in self.edges:
                if a == v:
                    dist[b] = np.maximum(dist[b], dist[a] + lengths[:, k])
        return dist[self.sink]


def load_dag(path) -> DagSpec:
    """Read a network from a plain-text edge list.

    The first non-comment line is ``nodes=<k> source=<s> sink=<t>``; every
    following line is ``<from> <to> <model_index>`` with 0-based model
    indices.
    """
    lines = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise ValidationError(f"{path}: empty network file")
    header = {}
    for tok in lines[0].split():
        key, _, val = tok.partition("=")
        header[key] = val
    try:
        nodes, source, sink = (int(header[k])
                               for k in ("nodes", "source", "sink"))
    except (KeyError, ValueError):
        raise ValidationError(
            f"{path}: header must read 'nodes=<k> source=<s> sink=<t>'")
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 3:
            raise ValidationError(f"{path}: bad edge line {ln!r}")
        edges.append(tuple(int(p) for p in parts))
    return DagSpec(nodes, tuple(edges), source, sink)


def dump_dag(dag: DagSpec) -> str:
    out = [f"nodes={dag.nodes} source={dag.source} sink={dag.sink}"]
    out += [f"{a} {b} {k}" for a, b, k in dag.edges]
    return "\n".join(out) + "\n"


class _LongestPath:
    def __init__(self, dag: DagSpec, threshold: Optional[float]):
        self.dag = dag
        self.threshold = threshold

    def __call__(self, *edge_lengths):
        L = np.concatenate([x[..., 0] for x in edge_lengths], axis=1)
        length = self.dag.longest_path(L)
        if self.threshold is None:
            return length
        return (length > self.threshold).astype(float)


def san(dag: DagSpec, mode: str = "completion_time",
        threshold: Optional[float] = None) -> PerformanceModel:
    """Project completion time of a stochastic activity network, or the
    indicator that it exceeds ``threshold`` (``mode="tail_indicator"``)."""
    if mode == "completion_time":
        func, rng_ = _LongestPath(dag, None), (0.0, np.inf)
    elif mode == "tail_indicator":
        if threshold is None:
            raise ValueError("tail_indicator mode needs a threshold")
        func, rng_ = _LongestPath(dag, float(threshold)), (0.0, 1.0)
    else:
        raise ValueError(f"unknown SAN mode {mode!r}")
    m = dag.m
    name = "san" if threshold is None else "san_tail"
    return PerformanceModel(func, (1,) * m, natural_range=rng_,
                            vectorized=True, dims=(1,) * m, name=name)


# 5 tasks on 4 nodes; input model k is the duration of task X_{k+1}
SAN5 = DagSpec(4, ((1, 2, 0), (2, 3, 1), (1, 3, 2), (2, 4, 3), (3, 4, 4)),
               1, 4)

# 14 tasks on 10 nodes
SAN14 = DagSpec(10, ((1, 2, 0), (1, 3, 1), (1, 4, 2), (2, 5, 3), (2, 6, 4),
                     (3, 5, 5), (3, 6, 6), (4, 7, 7), (4, 8, 8), (5, 9, 9),
                     (6, 9, 10), (7, 10, 11), (8, 10, 12), (9, 10, 13)),
                1, 10)


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Preset:
    name: str
    model: PerformanceModel
    truth_spec: TrueInputSpec
    sizes: tuple
    budget: int
    # pinned Monte Carlo truth: (value, standard error, N, seed)
    truth: Optional[tuple] = None


SAN_RATES_5 = (10, 5, 12, 11, 5)
SAN_RATES_14 = (10, 5, 12, 11, 5, 8, 4, 9, 13, 7, 6, 9, 10, 6)

# Produced by estimate_truth(model, truth_spec, N, seed) with the N and
# seed recorded alongside; tests recompute them bit-exactly.
TRUTH_SEED = 20240917
PINNED_TRUTHS = {
    "mm1": (2.3610858983483487, 0.000790302425097399, 10_000_000,
            TRUTH_SEED),
    "san5": (0.518900228885847, 9.193577275766304e-05, 10_000_000,
             TRUTH_SEED),
    "san14": (0.9284648233908953, 0.00011550361486039393, 10_000_000,
              TRUTH_SEED),
    "san14_tail": (0.0745752, 8.307451260545236e-05, 10_000_000,
                   TRUTH_SEED),
}


def builtin_specs() -> dict:
    """Named presets of the benchmark experiments."""
    return {
        "mm1": Preset("mm1", mm1_waiting_time(),
                      TrueInputSpec.exponential((0.95, 1.0)), (30, 25), 2000,
                      PINNED_TRUTHS["mm1"]),
        "san5": Preset("san5", san(SAN5),
                       TrueInputSpec.exponential(SAN_RATES_5),
                       (200, 200, 30, 30, 30), 8000, PINNED_TRUTHS["san5"]),
        "san14": Preset("san14", san(SAN14),
                        TrueInputSpec.exponential(SAN_RATES_14),
                        (30,) * 7 + (25,) * 7, 4000, PINNED_TRUTHS["san14"]),
        "san14_tail": Preset("san14_tail",
                             san(SAN14, "tail_indicator", threshold=1.5),
                             TrueInputSpec.exponential(SAN_RATES_14),
                             (120,) * 7 + (100,) * 7, 16000,
                             PINNED_TRUTHS["san14_tail"]),
    }


def get_preset(name: str) -> Preset:
    specs = builtin_specs()
    try:
        return specs[name]
    except KeyError:
        raise ValidationError(
            f"unknown preset {name!r}; valid presets: "
            + ", ".join(sorted(specs))) from None
