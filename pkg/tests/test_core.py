import numpy as np
import pytest

from elci.core import (BudgetPlan, ConfidenceInterval, InputDataset,
                       PerformanceModel, ProbabilityWeights, ValidationError,
                       validate)
from elci.models import get_preset, mm1_waiting_time


def test_mm1_dataset_validates():
    rng = np.random.default_rng(0)
    ds = InputDataset([rng.exponential(1, 30), rng.exponential(1, 25)])
    validate(ds, mm1_waiting_time())
    assert ds.sizes == (30, 25)
    assert ds.total_size == 55
    assert ds.mean_size == 27.5
    assert ds.dims == (1, 1)


def test_sample_too_small():
    with pytest.raises(ValidationError, match="sample too small"):
        InputDataset([[1.0], [1.0, 2.0]])


def test_arity_mismatch():
    ds = InputDataset([[1.0, 2.0], [3.0, 4.0]])
    with pytest.raises(ValidationError,
                       match="model/dataset arity mismatch"):
        validate(ds, get_preset("san5").model)


def test_dimension_mismatch():
    ds = InputDataset([np.ones((3, 2)), [1.0, 2.0]])
    with pytest.raises(ValidationError, match="dimension mismatch"):
        validate(ds, mm1_waiting_time())


def test_non_finite_rejected():
    with pytest.raises(ValidationError, match="non-finite"):
        InputDataset([[1.0, np.nan]])


def test_dataset_is_immutable_and_vector_valued():
    ds = InputDataset([np.arange(6.0).reshape(3, 2)])
    assert ds.dims == (2,)
    with pytest.raises(ValueError):
        ds[0][0, 0] = 5.0


def test_duplicates_are_distinct_atoms():
    ds = InputDataset([[1.0, 1.0, 1.0]])
    assert ds.sizes == (3,)


def test_weights_invariants():
    ProbabilityWeights([[0.5, 0.5], [1.0, 0.0, 0.0]])
    with pytest.raises(ValidationError):
        ProbabilityWeights([[0.6, 0.5]])
    with pytest.raises(ValidationError):
        ProbabilityWeights([[1.5, -0.5]])
    ProbabilityWeights([[0.5, 0.5 + 5e-10]])
    u = ProbabilityWeights.uniform((2, 4))
    assert np.allclose(u[1], 0.25)


def test_performance_model_single_and_batch():
    f = lambda x, y: float(x.sum() + y.sum())
    model = PerformanceModel(f, (2, 1))
    assert model(np.array([1.0, 2.0]), np.array([3.0])) == 6.0
    batch = [np.ones((4, 2, 1)), np.full((4, 1, 1), 2.0)]
    assert np.array_equal(model.evaluate_batch(batch), np.full(4, 4.0))
    with pytest.raises(ValidationError):
        PerformanceModel(f, (0, 1))
    with pytest.raises(ValidationError):
        PerformanceModel(f, (1,), natural_range=(1.0, 0.0))


def test_interval_invariants():
    ci = ConfidenceInterval(1.0, 2.0, 0.95, "FEL")
    assert ci.length == 1.0
    assert ci.contains(1.0) and ci.contains(2.0) and not ci.contains(2.5)
    assert ci.overshoots((1.5, 3.0)) and not ci.overshoots((0.0, np.inf))
    with pytest.raises(ValueError):
        ConfidenceInterval(2.0, 1.0, 0.95, "FEL")
    with pytest.raises(ValueError):
        ConfidenceInterval(1.0, 2.0, 0.95, "XYZ")
    crossed = ConfidenceInterval(1.5, 1.5, 0.95, "BEL", {"crossed": True})
    assert not crossed.contains(1.5)


def test_budget_plan():
    assert BudgetPlan(R1=1900, R2=50).total == 2000
    assert BudgetPlan(B=1000, R_b=2).total == 2000
    assert BudgetPlan(R_d=2000).total == 2000
    for bad in (dict(R2=1), dict(R_d=1), dict(R_b=0), dict(B=2),
                dict(R1=1)):
        with pytest.raises(ValidationError):
            BudgetPlan(**bad)
