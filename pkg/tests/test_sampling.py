import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from elci.core import InputDataset, PerformanceModel, ProbabilityWeights
from elci.models import SAN5, san
from elci.sampling import (StreamKey, derive_stream, draw_indices,
                           draw_replication, simulate)


def binomial_band(p, n, z=5.0):
    return z * math.sqrt(p * (1 - p) / n)


def test_same_key_same_stream():
    k = StreamKey(123, (("step1", 0), ("rep", 7)))
    a = derive_stream(k).random(100)
    b = derive_stream(StreamKey(123, (("step1", 0), ("rep", 7)))).random(100)
    assert np.array_equal(a, b)


def test_keys_differing_in_one_index_differ():
    a = derive_stream(StreamKey(1, (("rep", 7),))).random(100)
    b = derive_stream(StreamKey(1, (("rep", 8),))).random(100)
    c = derive_stream(StreamKey(1, (("rap", 7),))).random(100)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_stream_is_stable_across_runs():
    # frozen first variates of a fixed key guard against accidental changes
    # to the key derivation
    frozen = [0.30600076445157487, 0.04142823710349841, 0.49364061458915187]
    k = StreamKey(123).child("step1").child("rep", 7)
    assert derive_stream(k).random(3).tolist() == frozen


def test_point_mass_draws():
    rng = derive_stream(StreamKey(0))
    idx = draw_indices(np.array([1.0, 0.0, 0.0]), 10_000, rng)
    assert np.all(idx == 0)
    idx = draw_indices(np.array([0.0, 0.0, 1.0]), 10_000, rng)
    assert np.all(idx == 2)


def test_uniform_frequencies():
    rng = derive_stream(StreamKey(1))
    idx = draw_indices(np.full(4, 0.25), 10**6, rng)
    freq = np.bincount(idx, minlength=4) / 10**6
    assert np.all(np.abs(freq - 0.25) <= 0.002)


def test_skewed_frequencies():
    rng = derive_stream(StreamKey(2))
    w = np.array([0.93055, 0.06945])
    idx = draw_indices(w, 10**6, rng)
    f = np.mean(idx == 1)
    assert abs(f - 0.06945) <= binomial_band(0.06945, 10**6)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=8),
       st.integers(0, 2**32))
def test_frequencies_converge_to_weights(raw, seed):
    w = np.array(raw)
    if w.sum() <= 0:
        w[0] = 1.0
    w = w / w.sum()
    R = 20_000
    idx = draw_indices(w, R, derive_stream(StreamKey(seed)))
    freq = np.bincount(idx, minlength=w.size) / R
    band = np.array([binomial_band(p, R, z=5.5) for p in w]) + 1e-12
    assert np.all(np.abs(freq - w) <= band)
    assert np.all(freq[w == 0] == 0)


def test_replication_shapes():
    w = ProbabilityWeights.uniform((3, 5))
    d = draw_replication(w, (9, 2), derive_stream(StreamKey(0)), R=4)
    assert [x.shape for x in d] == [(4, 9), (4, 2)]
    assert d[0].max() < 3 and d[1].max() < 5


def test_simulate_constant_model():
    model = PerformanceModel(lambda x: 3.5, (4,))
    ds = InputDataset([[1.0, 2.0, 3.0]])
    w = ProbabilityWeights([[0.2, 0.3, 0.5]])
    out = simulate(model, ds, w, 5, derive_stream(StreamKey(0)))
    assert np.array_equal(out, np.full(5, 3.5))


def test_simulate_point_mass_san5():
    model = san(SAN5)
    rng = np.random.default_rng(5)
    ds = InputDataset([rng.exponential(1, 4) for _ in range(5)])
    pick = [1, 3, 0, 2, 2]
    w = ProbabilityWeights([np.eye(4)[j] for j in pick])
    out = simulate(model, ds, w, 7, derive_stream(StreamKey(3)))
    x = [ds[i][j, 0] for i, j in enumerate(pick)]
    expected = max(x[0] + x[1] + x[4], x[0] + x[3], x[2] + x[4])
    assert np.all(out == expected)


def test_simulate_reproducible():
    model = san(SAN5)
    rng = np.random.default_rng(5)
    ds = InputDataset([rng.exponential(1, 6) for _ in range(5)])
    w = ProbabilityWeights.uniform(ds.sizes)
    key = StreamKey(9).child("x", 1)
    a = simulate(model, ds, w, 50, derive_stream(key))
    b = simulate(model, ds, w, 50, derive_stream(key))
    assert np.array_equal(a, b)


def test_non_finite_output_names_replication():
    model = PerformanceModel(lambda x: np.where(x[:, 0, 0] > 1.5, np.inf,
                                                0.0), (1,), vectorized=True)
    ds = InputDataset([[1.0, 2.0]])
    w = ProbabilityWeights([[0.0, 1.0]])
    with pytest.raises(FloatingPointError, match="replication 0"):
        simulate(model, ds, w, 3, derive_stream(StreamKey(0)))
