"""Reproducible random streams and weighted resampling of empirical data."""
from __future__ import annotations

import zlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import InputDataset, PerformanceModel, ProbabilityWeights

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class StreamKey:
    """Address of an independent random stream.

    A key is a master seed plus an ordered path of ``(tag, index)``
    labels. Equal keys give identical streams; keys that differ anywhere
    in the path give unrelated streams.
    """

    master_seed: int
    labels: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "master_seed", int(self.master_seed) & _MASK64)
        object.__setattr__(self, "labels",
                           tuple((str(t), int(i)) for t, i in self.labels))

    def child(self, tag: str, index: int = 0) -> "StreamKey":
        return StreamKey(self.master_seed, self.labels + ((tag, index),))

    def spawn_key(self) -> tuple:
        key = []
        for tag, index in self.labels:
            # crc32 is stable across processes, unlike hash()
            key.append(zlib.crc32(tag.encode("utf-8")))
            key.append(index & _MASK64)
        return tuple(key)


def as_key(seed) -> StreamKey:
    if isinstance(seed, StreamKey):
        return seed
    return StreamKey(int(seed))


def derive_stream(key: StreamKey) -> np.random.Generator:
    """Return a fresh generator that is a pure function of ``key``."""
    ss = np.random.SeedSequence(entropy=key.master_seed,
                                spawn_key=key.spawn_key())
    return np.random.Generator(np.random.PCG64(ss))


def draw_indices(weights: np.ndarray, size, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF draws of 0-based indices, one uniform per variate."""
    w = np.asarray(weights, dtype=float)
    cdf = np.cumsum(w)
    total = cdf[-1]
    if not total > 0:
        raise ValueError("degenerate weight vector: all weights are zero")
    u = rng.random(size) * total
    idx = np.searchsorted(cdf, u, side="right")
    # u can round up to total at the right edge; keep it on the last atom
    # carrying positive mass
    last = int(np.flatnonzero(w > 0)[-1])
    return np.minimum(idx, last)


def draw_replication(weights: ProbabilityWeights, run_lengths: Sequence[int],
                     stream: np.random.Generator, R: int = 1) -> list:
    """Draw the data indices used by ``R`` replications.

    Returns one integer array of shape ``(R, T_i)`` per input model,
    holding 0-based indices into sample ``i``.
    """
    if len(weights) != len(run_lengths):
        raise ValueError(
            f"weights cover {len(weights)} input models but run lengths "
            f"cover {len(run_lengths)}")
    return [draw_indices(w, (R, int(t)), stream)
            for w, t in zip(weights, run_lengths)]


def gather(dataset: InputDataset, draws: Sequence[np.ndarray]) -> list:
    """Map index draws to observation arrays of shape ``(R, T_i, d_i)``."""
    return [dataset[i][idx] for i, idx in enumerate(draws)]


def evaluate_draws(model: PerformanceModel, dataset: InputDataset,
                   draws: Sequence[np.ndarray]) -> np.ndarray:
    out = model.evaluate_batch(gather(dataset, draws))
    bad = np.flatnonzero(~np.isfinite(out))
    if bad.size:
        r = int(bad[0])
        raise FloatingPointError(
            f"model returned non-finite value {out[r]} at replication {r}")
    return out


def simulate(model: PerformanceModel, dataset: InputDataset,
             weights: ProbabilityWeights, R: int,
             stream: np.random.Generator) -> np.ndarray:
    """Run ``R`` replications of ``model`` driven by weighted empirical
    distributions of ``dataset``."""
    if R < 1:
        raise ValueError("R must be at least 1")
    draws = draw_replication(weights, model.run_lengths, stream, R)
    return evaluate_draws(model, dataset, draws)
