import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from elci.core import InputDataset, PerformanceModel
from elci.influence import (InfluenceEstimate, estimate_influence,
                            influence_from_draws, input_variance)
from elci.models import SAN5, mm1_waiting_time, san
from elci.sampling import StreamKey

identity = PerformanceModel(lambda x: x[:, 0, 0], (1,), vectorized=True)


def test_constant_model():
    model = PerformanceModel(lambda x, y: np.full(x.shape[0], 4.0), (3, 2),
                             vectorized=True)
    ds = InputDataset([[1.0, 2.0, 3.0], [5.0, 6.0]])
    est = estimate_influence(model, ds, 200, StreamKey(0))
    assert est.z_hat == 4.0
    assert est.sigma2_hat == 0.0
    assert all(np.all(g == 0) for g in est.g_hats)
    assert input_variance(est, ds) == 0.0


def test_two_point_limit():
    # h(x) = x on data {0, 1}: exact influence is x - mean = (-1/2, 1/2)
    ds = InputDataset([[0.0, 1.0]])
    est = estimate_influence(identity, ds, 400_000, StreamKey(1))
    assert np.allclose(est.g_hats[0], [-0.5, 0.5], atol=5e-3)


def test_consistency_rate():
    rng = np.random.default_rng(3)
    x = rng.normal(size=8)
    ds = InputDataset([x])
    exact = x - x.mean()
    rmse = []
    for R1 in (2_000, 32_000):
        errs = [np.sqrt(np.mean((estimate_influence(
            identity, ds, R1, StreamKey(7, (("r", s),))).g_hats[0]
            - exact) ** 2)) for s in range(8)]
        rmse.append(np.mean(errs))
    # 16x more replications -> about 4x smaller error
    assert 2.5 < rmse[0] / rmse[1] < 6.5


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(2, 9), min_size=1, max_size=3),
       st.lists(st.integers(1, 4), min_size=3, max_size=3),
       st.integers(2, 60), st.integers(0, 2**32))
def test_zero_sum_scores(sizes, Ts, R1, seed):
    rng = np.random.default_rng(seed)
    Ts = Ts[:len(sizes)]
    draws = [rng.integers(0, n, size=(R1, T)) for n, T in zip(sizes, Ts)]
    h = rng.normal(size=R1) * rng.choice([1e-3, 1.0, 1e3])
    g_hats, z, s2 = influence_from_draws(h, draws, sizes, Ts)
    assert s2 >= 0
    for g in g_hats:
        assert abs(g.sum()) <= 1e-9 * R1 * max(np.abs(h).max(), 1.0)


def test_counts_match_direct_formula():
    rng = np.random.default_rng(4)
    n, T, R1 = 5, 3, 40
    idx = rng.integers(0, n, size=(R1, T))
    h = rng.normal(size=R1)
    (g,), z, s2 = influence_from_draws(h, [idx], [n], [T])
    counts = np.stack([(idx == j).sum(axis=1) for j in range(n)], axis=1)
    direct = ((h - h.mean())[:, None] * (n * counts - T)).mean(axis=0)
    assert np.allclose(g, direct, rtol=0, atol=1e-12)
    assert np.isclose(s2, h.var(ddof=1))


def test_input_variance_arithmetic():
    ds = InputDataset([[0.0, 1.0]])
    est = InfluenceEstimate((np.array([-0.5, 0.5]),), 0.0, 0.0, 10, (1,))
    assert input_variance(est, ds) == pytest.approx(0.125, abs=1e-15)


def test_input_variance_positive_part():
    ds = InputDataset([[0.0, 1.0]])
    est = InfluenceEstimate((np.array([-0.1, 0.1]),), 0.0, 100.0, 2, (1,))
    assert input_variance(est, ds) == 0.0


def test_input_variance_shift_invariant():
    rng = np.random.default_rng(0)
    ds = InputDataset([rng.exponential(1, 10) for _ in range(5)])
    base = san(SAN5)
    shifted = PerformanceModel(lambda *x: base.func(*x) + 100.0,
                               base.run_lengths, vectorized=True)
    a = estimate_influence(base, ds, 500, StreamKey(2))
    b = estimate_influence(shifted, ds, 500, StreamKey(2))
    assert input_variance(a, ds) == pytest.approx(input_variance(b, ds),
                                                  rel=1e-9)


def test_r1_validated():
    ds = InputDataset([[0.0, 1.0], [1.0, 2.0]])
    with pytest.raises(ValueError):
        estimate_influence(mm1_waiting_time(), ds, 1, StreamKey(0))
