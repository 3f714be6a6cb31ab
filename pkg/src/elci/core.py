"""Shared data model: input datasets, probability weights, performance
models, solver results and confidence intervals.

Observations are stored per input model as a 2-d float array of shape
``(n_i, d_i)``. Identity of an observation is its row index, so duplicated
values remain distinct support atoms.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

METHODS = ("BEL", "EEL", "FEL", "LEL", "BOOT", "DELTA")


class ValidationError(ValueError):
    """Dataset, model or budget violates a documented invariant."""


class SolverError(RuntimeError):
    """The min/max weight program could not be solved."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


def _as_observations(sample) -> np.ndarray:
    arr = np.asarray(sample, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValidationError(
            "observations must be a 1-d sequence of scalars or a 2-d "
            f"array of vectors, got shape {arr.shape}")
    return arr


class InputDataset:
    """Observed samples, one per input model.

    Parameters
    ----------
    models : sequence of array_like
        ``models[i]`` holds the ``n_i`` observations of input model ``i``,
        either as scalars or as rows of a 2-d array.
    """

    def __init__(self, models: Sequence):
        samples = tuple(_as_observations(s) for s in models)
        for s in samples:
            s.setflags(write=False)
        self._samples = samples
        self._check()

    def _check(self):
        if len(self._samples) < 1:
            raise ValidationError("dataset needs at least one input model")
        for i, s in enumerate(self._samples):
            if s.shape[0] < 2:
                raise ValidationError(
                    f"sample too small: input model {i} has n={s.shape[0]} "
                    "observations, need at least 2")
            if not np.all(np.isfinite(s)):
                raise ValidationError(
                    f"non-finite observation in input model {i}")

    @property
    def samples(self) -> tuple:
        return self._samples

    @property
    def m(self) -> int:
        return len(self._samples)

    @property
    def sizes(self) -> tuple:
        return tuple(s.shape[0] for s in self._samples)

    @property
    def dims(self) -> tuple:
        return tuple(s.shape[1] for s in self._samples)

    @property
    def total_size(self) -> int:
        """N, the total number of observations across input models."""
        return int(sum(self.sizes))

    @property
    def mean_size(self) -> float:
        return self.total_size / self.m

    def __getitem__(self, i) -> np.ndarray:
        return self._samples[i]

    def __len__(self):
        return self.m

    def __eq__(self, other):
        if not isinstance(other, InputDataset) or other.m != self.m:
            return NotImplemented
        return all(np.array_equal(a, b)
                   for a, b in zip(self._samples, other._samples))

    def __repr__(self):
        return f"InputDataset(sizes={self.sizes}, dims={self.dims})"


class ProbabilityWeights:
    """Per-model weight vectors on the data support."""

    def __init__(self, weights: Sequence, tol: float = 1e-9):
        ws = tuple(np.array(w, dtype=float).ravel() for w in weights)
        for i, w in enumerate(ws):
            if w.size == 0:
                raise ValidationError(f"empty weight vector for model {i}")
            if not np.all(np.isfinite(w)) or np.any(w < 0):
                raise ValidationError(
                    f"weights of model {i} must be finite and nonnegative")
            if abs(w.sum() - 1.0) > tol:
                raise ValidationError(
                    f"weights of model {i} sum to {w.sum():.12g}, not 1")
            w.setflags(write=False)
        self._weights = ws

    @classmethod
    def uniform(cls, sizes: Sequence[int]) -> "ProbabilityWeights":
        return cls([np.full(n, 1.0 / n) for n in sizes])

    @property
    def sizes(self) -> tuple:
        return tuple(w.size for w in self._weights)

    def __getitem__(self, i) -> np.ndarray:
        return self._weights[i]

    def __len__(self):
        return len(self._weights)

    def __iter__(self):
        return iter(self._weights)

    def __repr__(self):
        return f"ProbabilityWeights(sizes={self.sizes})"


@dataclass(frozen=True)
class PerformanceModel:
    """Black-box simulation output ``h`` with its run lengths.

    ``func`` receives one array per input model. With ``vectorized=True``
    each array has shape ``(R, T_i, d_i)`` and ``func`` must return ``R``
    outputs; otherwise arrays have shape ``(T_i, d_i)`` and ``func``
    returns one float.
    """

    func: Callable
    run_lengths: tuple
    natural_range: Optional[tuple] = None
    vectorized: bool = False
    dims: Optional[tuple] = None
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "run_lengths",
                           tuple(int(t) for t in self.run_lengths))
        if any(t < 1 for t in self.run_lengths):
            raise ValidationError("run lengths must be positive integers")
        if self.natural_range is not None:
            lo, hi = self.natural_range
            if lo > hi:
                raise ValidationError("natural_range must satisfy lo <= hi")
            object.__setattr__(self, "natural_range", (float(lo), float(hi)))
        if self.dims is not None:
            object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))

    @property
    def m(self) -> int:
        return len(self.run_lengths)

    def evaluate_batch(self, inputs: Sequence[np.ndarray]) -> np.ndarray:
        """Evaluate ``h`` on ``R`` replications at once."""
        if self.vectorized:
            out = np.asarray(self.func(*inputs), dtype=float).reshape(-1)
        else:
            R = inputs[0].shape[0]
            out = np.fromiter(
                (self.func(*(x[r] for x in inputs)) for r in range(R)),
                dtype=float, count=R)
        return out

    def __call__(self, *inputs) -> float:
        """Evaluate ``h`` on a single replication."""
        batch = [np.asarray(x, dtype=float).reshape(1, t, -1)
                 for x, t in zip(inputs, self.run_lengths)]
        return float(self.evaluate_batch(batch)[0])


@dataclass(frozen=True)
class ElSolution:
    w_min: ProbabilityWeights
    w_max: ProbabilityWeights
    obj_min: float
    obj_max: float
    beta_min: float
    beta_max: float
    lambdas_min: np.ndarray
    lambdas_max: np.ndarray
    degenerate: bool
    chi2: float = float("nan")
    beta_upper: float = float("nan")


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float
    method: str
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method tag {self.method!r}")
        if not (0.0 < self.level < 1.0):
            raise ValueError("level must lie in (0, 1)")
        if not self.lower <= self.upper:
            raise ValueError(
                f"lower bound {self.lower} exceeds upper bound {self.upper}")

    @property
    def length(self) -> float:
        return self.upper - self.lower

    @property
    def crossed(self) -> bool:
        """True when the raw bounds came out in reverse order."""
        return bool(self.diagnostics.get("crossed", False))

    def contains(self, value: float) -> bool:
        return not self.crossed and self.lower <= value <= self.upper

    def overshoots(self, natural_range) -> bool:
        if natural_range is None:
            return False
        lo, hi = natural_range
        return self.lower < lo or self.upper > hi


@dataclass(frozen=True)
class BudgetPlan:
    """Simulation budgets per method family; unset entries are ``None``."""

    R1: Optional[int] = None
    R2: Optional[int] = None
    B: Optional[int] = None
    R_b: Optional[int] = None
    R_d: Optional[int] = None

    def __post_init__(self):
        for name in ("R1", "R2", "B", "R_b", "R_d"):
            v = getattr(self, name)
            if v is not None and (int(v) != v or v < 1):
                raise ValidationError(f"{name} must be a positive integer")
        if self.R1 is not None and self.R1 < 2:
            raise ValidationError("R1 must be at least 2")
        if self.R2 is not None and self.R2 < 2:
            raise ValidationError(
                "R2 must be at least 2 (sample variance needs R2 - 1 > 0)")
        if self.R_d is not None and self.R_d < 2:
            raise ValidationError("R_d must be at least 2")
        if self.B is not None and self.B < 3:
            raise ValidationError("B must be at least 3")

    @property
    def total(self) -> int:
        """Total number of simulation replications the plan consumes."""
        tot = 0
        if self.R1 is not None:
            tot += self.R1 + 2 * (self.R2 or 0)
        if self.B is not None:
            tot += self.B * (self.R_b or 0)
        if self.R_d is not None:
            tot += self.R_d
        return tot


def validate(dataset: InputDataset, model: PerformanceModel) -> None:
    """Check that ``dataset`` can drive ``model``.

    Raises
    ------
    ValidationError
        On arity or dimension mismatch, too-small samples or non-finite
        observations.
    """
    if not isinstance(dataset, InputDataset):
        dataset = InputDataset(dataset)
    dataset._check()
    if model.m != dataset.m:
        raise ValidationError(
            f"model/dataset arity mismatch: model expects m={model.m} input "
            f"models, dataset has m={dataset.m}")
    if model.dims is not None and tuple(model.dims) != dataset.dims:
        raise ValidationError(
            f"dimension mismatch: model expects observation dims "
            f"{model.dims}, dataset has {dataset.dims}")
