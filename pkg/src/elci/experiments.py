"""Coverage experiments: draw synthetic datasets from known input laws,
build intervals by each configured method and summarize coverage, CI
length and overshoot."""
from __future__ import annotations

import configparser
import csv
import io
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .ci_methods import (delta_method, el_interval, percentile_bootstrap,
                         run_pipeline)
from .core import BudgetPlan, PerformanceModel, ValidationError
from .models import TrueInputSpec, get_preset, load_dag, san
from .sampling import StreamKey, derive_stream

log = logging.getLogger(__name__)

EL_METHODS = ("bel", "eel", "fel", "lel")
ALL_METHODS = EL_METHODS + ("boot", "delta")
CSV_HEADER = ("method", "params", "coverage", "mean_len", "std_len",
              "overshoot", "secs_per_ci", "failures")
TRUTH_CHUNK = 1_000_000


# ---------------------------------------------------------------------------
# Ground truth
# ---------------------------------------------------------------------------

def estimate_truth(model: PerformanceModel, true_spec: TrueInputSpec,
                   N: int, seed: int, chunk: int = TRUTH_CHUNK):
    """Monte Carlo mean of ``h`` under the true input laws.

    Returns ``(value, standard_error)``. Replications are generated in
    fixed-size chunks, each from its own stream, so the result depends only
    on ``(N, seed, chunk)``.
    """
    if N < 1000:
        raise ValidationError("truth estimation needs N >= 1000")
    if true_spec.m != model.m:
        raise ValidationError("true input spec and model arity differ")
    key = StreamKey(seed, (("truth", 0),))
    total = 0.0
    total_sq = 0.0
    done = 0
    c = 0
    while done < N:
        R = min(chunk, N - done)
        rng = derive_stream(key.child("chunk", c))
        out = model.evaluate_batch(true_spec.draw_inputs(model.run_lengths,
                                                         R, rng))
        total += float(out.sum())
        total_sq += float(out @ out)
        done += R
        c += 1
    mean = total / N
    var = max(total_sq / N - mean * mean, 0.0) * N / (N - 1)
    return mean, math.sqrt(var / N)


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MethodRow:
    method: str
    r1: Optional[int] = None
    r2: Optional[int] = None
    b: Optional[int] = None
    rb: Optional[int] = None
    rd: Optional[int] = None

    def __post_init__(self):
        if self.method not in ALL_METHODS:
            raise ValidationError(
                f"unknown method {self.method!r}; choose from "
                + ", ".join(ALL_METHODS))
        need = {"boot": ("b", "rb"), "delta": ("rd",)}.get(
            self.method, ("r1", "r2"))
        for k in need:
            if getattr(self, k) is None:
                raise ValidationError(
                    f"method {self.method} needs parameter {k}")
        self.plan()

    def plan(self) -> BudgetPlan:
        if self.method in EL_METHODS:
            return BudgetPlan(R1=self.r1, R2=self.r2)
        if self.method == "boot":
            return BudgetPlan(B=self.b, R_b=self.rb)
        return BudgetPlan(R_d=self.rd)

    @property
    def params(self) -> str:
        if self.method in EL_METHODS:
            return f"R1={self.r1} R2={self.r2}"
        if self.method == "boot":
            return f"B={self.b} R_b={self.rb}"
        return f"R_d={self.rd}"

    def benchmark(self, budget: int) -> "MethodRow":
        """Same method with simulation noise made negligible."""
        if self.method in EL_METHODS:
            return replace(self, r1=budget, r2=budget)
        if self.method == "boot":
            return replace(self, rb=max(1, budget // self.b))
        return replace(self, rd=budget)


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    model: PerformanceModel
    true_spec: TrueInputSpec
    sizes: tuple
    K: int
    rows: tuple
    alpha: float = 0.05
    seed: int = 0
    truth: Optional[float] = None
    truth_se: Optional[float] = None
    truth_N: Optional[int] = None
    truth_seed: Optional[int] = None
    budget: Optional[int] = None
    benchmark: bool = False
    benchmark_budget: int = 50_000
    source: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        object.__setattr__(self, "rows", tuple(self.rows))
        if self.K < 1:
            raise ValidationError("replications K must be at least 1")
        if not 0.0 < self.alpha < 1.0:
            raise ValidationError("alpha must lie in (0, 1)")
        if not self.rows:
            raise ValidationError("experiment needs at least one method row")
        if len(self.sizes) != self.model.m or self.true_spec.m != self.model.m:
            raise ValidationError(
                "sizes, true input laws and model must cover the same "
                "number of input models")
        if any(n < 2 for n in self.sizes):
            raise ValidationError("every data size must be at least 2")
        if self.budget is not None and not self.benchmark:
            for r in self.rows:
                if r.plan().total != self.budget:
                    raise ValidationError(
                        f"row {r.method} {r.params} uses "
                        f"{r.plan().total} replications, declared budget "
                        f"is {self.budget}")

    def effective_rows(self) -> tuple:
        if not self.benchmark:
            return self.rows
        return tuple(r.benchmark(self.benchmark_budget) for r in self.rows)


_EXPERIMENT_KEYS = {"name", "preset", "dag", "mode", "threshold", "rates",
                    "sizes", "replications", "alpha", "seed", "budget",
                    "benchmark", "benchmark_budget"}
_TRUTH_KEYS = {"value", "se", "oracle_n", "oracle_seed"}
_ROW_KEYS = {"method", "r1", "r2", "b", "rb", "rd"}


def _ints(text):
    return tuple(int(t) for t in text.replace(",", " ").split())


def _floats(text):
    return tuple(float(t) for t in text.replace(",", " ").split())


def _get(section, key, conv):
    try:
        return conv(section[key])
    except (ValueError, TypeError):
        raise ValidationError(
            f"[{section.name}] {key}: cannot parse {section[key]!r}") from None


def parse_config(text: str, base_dir=".") -> ExperimentConfig:
    """Build an ``ExperimentConfig`` from INI-style text.

    Sections: ``[experiment]`` (model and protocol), optional ``[truth]``,
    and one ``[row <label>]`` section per method row in table order.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ValidationError(f"config syntax error: {exc}") from None
    if "experiment" not in cp:
        raise ValidationError("config needs an [experiment] section")
    exp = cp["experiment"]
    for key in exp:
        if key not in _EXPERIMENT_KEYS:
            raise ValidationError(f"[experiment] unknown key {key!r}")

    pinned = None
    if "preset" in exp:
        preset = get_preset(exp["preset"])
        model, true_spec = preset.model, preset.truth_spec
        sizes, budget, pinned = preset.sizes, preset.budget, preset.truth
    elif "dag" in exp:
        dag = load_dag(Path(base_dir) / exp["dag"])
        mode = exp.get("mode", "completion_time")
        thr = _get(exp, "threshold", float) if "threshold" in exp else None
        model = san(dag, mode, thr)
        if "rates" not in exp:
            raise ValidationError("[experiment] rates: required with dag")
        true_spec = TrueInputSpec.exponential(_get(exp, "rates", _floats))
        sizes, budget = None, None
    else:
        raise ValidationError("[experiment] needs either preset or dag")

    if "sizes" in exp:
        sizes = _get(exp, "sizes", _ints)
    if sizes is None:
        raise ValidationError("[experiment] sizes: required")
    if "budget" in exp:
        # "none" switches off the per-row budget check
        budget = (None if exp["budget"].strip().lower() == "none"
                  else _get(exp, "budget", int))
    if "replications" not in exp:
        raise ValidationError("[experiment] replications: required")

    truth = dict(value=None, se=None, N=None, seed=None)
    if pinned is not None:
        truth.update(value=pinned[0], se=pinned[1], N=pinned[2],
                     seed=pinned[3])
    if "truth" in cp:
        sec = cp["truth"]
        for key in sec:
            if key not in _TRUTH_KEYS:
                raise ValidationError(f"[truth] unknown key {key!r}")
        if "value" in sec:
            truth.update(value=_get(sec, "value", float), N=None, seed=None,
                         se=_get(sec, "se", float) if "se" in sec else 0.0)
        if "oracle_n" in sec:
            truth.update(value=None, se=None, N=_get(sec, "oracle_n", int),
                         seed=_get(sec, "oracle_seed", int)
                         if "oracle_seed" in sec else 0)

    rows = []
    for name in cp.sections():
        if name in ("experiment", "truth"):
            continue
        if not name.startswith("row"):
            raise ValidationError(f"unknown section [{name}]")
        sec = cp[name]
        for key in sec:
            if key not in _ROW_KEYS:
                raise ValidationError(f"[{name}] unknown key {key!r}")
        if "method" not in sec:
            raise ValidationError(f"[{name}] method: required")
        kw = {k: _get(sec, k, int) for k in _ROW_KEYS - {"method"} if k in sec}
        try:
            rows.append(MethodRow(sec["method"].strip().lower(), **kw))
        except ValidationError as exc:
            raise ValidationError(f"[{name}] {exc}") from None

    try:
        return ExperimentConfig(
            name=exp.get("name", "experiment"), model=model,
            true_spec=true_spec, sizes=sizes,
            K=_get(exp, "replications", int), rows=tuple(rows),
            alpha=_get(exp, "alpha", float) if "alpha" in exp else 0.05,
            seed=_get(exp, "seed", int) if "seed" in exp else 0,
            truth=truth["value"], truth_se=truth["se"], truth_N=truth["N"],
            truth_seed=truth["seed"], budget=budget,
            benchmark=exp.getboolean("benchmark", False),
            benchmark_budget=_get(exp, "benchmark_budget", int)
            if "benchmark_budget" in exp else 50_000,
            source={s: dict(cp[s]) for s in cp.sections()})
    except ValidationError as exc:
        key = "replications" if "K must" in str(exc) else None
        if key:
            raise ValidationError(f"[experiment] {key}: {exc}") from None
        raise


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    return parse_config(path.read_text(), base_dir=path.parent)


def resolve_truth(config: ExperimentConfig) -> ExperimentConfig:
    """Fill in the truth by running the oracle when only its budget is
    given."""
    if config.truth is not None:
        return config
    if config.truth_N is None:
        raise ValidationError("no truth value or oracle budget configured")
    value, se = estimate_truth(config.model, config.true_spec,
                               config.truth_N, config.truth_seed or 0)
    return replace(config, truth=value, truth_se=se)


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResultRow:
    method: str
    params: str
    coverage: float
    coverage_se: float
    mean_len: float
    std_len: float
    overshoot: float
    secs_per_ci: float
    failures: int
    n: int


def _replication(config: ExperimentConfig, rows, k: int) -> list:
    """Intervals of every row on dataset replication ``k``.

    Each entry is ``(lower, upper, covered, overshoot, secs)`` or ``None``
    when the method failed.
    """
    key = StreamKey(config.seed, (("rep", k),))
    data = config.true_spec.draw_dataset(config.sizes,
                                         derive_stream(key.child("data")))
    model, alpha, truth = config.model, config.alpha, config.truth
    pipelines = {}
    out = []
    for j, row in enumerate(rows):
        t0 = time.perf_counter()
        try:
            if row.method in EL_METHODS:
                budget = (row.r1, row.r2)
                if budget not in pipelines:
                    pkey = key.child("el_r1", row.r1).child("el_r2", row.r2)
                    p0 = time.perf_counter()
                    state = run_pipeline(model, data, alpha, row.r1, row.r2,
                                         pkey)
                    pipelines[budget] = (state, time.perf_counter() - p0)
                state, ptime = pipelines[budget]
                ci = el_interval(row.method, state)
                secs = ptime + time.perf_counter() - t0
            elif row.method == "boot":
                ci = percentile_bootstrap(model, data, alpha, row.b, row.rb,
                                          key.child("row", j))
                secs = time.perf_counter() - t0
            else:
                ci = delta_method(model, data, alpha, row.rd,
                                  key.child("row", j))
                secs = time.perf_counter() - t0
        except Exception as exc:  # recorded per row, never aborts the sweep
            log.debug("replication %d row %d failed: %s", k, j, exc)
            out.append(None)
            continue
        out.append((ci.lower, ci.upper, ci.contains(truth),
                    ci.overshoots(model.natural_range), secs))
    return out


def _chunk(args):
    config, rows, ks = args
    return [_replication(config, rows, k) for k in ks]


def run_replications(config: ExperimentConfig, workers: int = 1) -> list:
    """Per-replication raw results, ordered by replication index."""
    rows = config.effective_rows()
    ks = list(range(config.K))
    if workers <= 1:
        return [_replication(config, rows, k) for k in ks]
    size = max(1, math.ceil(len(ks) / (4 * workers)))
    chunks = [(config, rows, ks[i:i + size]) for i in range(0, len(ks), size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_chunk, chunks))
    return [rec for part in parts for rec in part]


def summarize(config: ExperimentConfig, records: list) -> list:
    rows = config.effective_rows()
    result = []
    for j, row in enumerate(rows):
        ok = [rec[j] for rec in records if rec[j] is not None]
        fails = len(records) - len(ok)
        if ok:
            arr = np.array([(lo, hi, cov, ov, s) for lo, hi, cov, ov, s in ok],
                           dtype=float)
            lengths = arr[:, 1] - arr[:, 0]
            cov = float(arr[:, 2].mean())
            result.append(ResultRow(
                row.method.upper(), row.params, cov,
                math.sqrt(cov * (1 - cov) / len(ok)), float(lengths.mean()),
                float(lengths.std(ddof=1)) if len(ok) > 1 else 0.0,
                float(arr[:, 3].mean()), float(arr[:, 4].mean()), fails,
                len(ok)))
        else:
            nan = float("nan")
            result.append(ResultRow(row.method.upper(), row.params, nan, nan,
                                    nan, nan, nan, nan, fails, 0))
    return result


def run_experiment(config: ExperimentConfig, workers: int = 1) -> list:
    """Run the coverage experiment and return one ``ResultRow`` per method
    row, in configuration order. Output depends only on ``config``."""
    config = resolve_truth(config)
    results = summarize(config, run_replications(config, workers))
    if config.truth_se:
        widths = [r.mean_len for r in results if r.mean_len > 0]
        if widths and config.truth_se > min(widths) / 100:
            log.warning("truth standard error %.3g exceeds 1%% of the "
                        "narrowest mean CI length %.3g", config.truth_se,
                        min(widths))
    return results


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{x:.6g}"


def table_text(rows, stable: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.method, r.params, _fmt(r.coverage), _fmt(r.mean_len),
                    _fmt(r.std_len), _fmt(r.overshoot),
                    "NA" if stable else _fmt(r.secs_per_ci), str(r.failures)])
    return buf.getvalue()


def emit_table(rows, path, stable: bool = False) -> None:
    """Write result rows as CSV. With ``stable=True`` the timing column is
    written as ``NA`` so that repeated runs give identical bytes."""
    rows = list(rows)
    if not rows:
        raise ValueError("no result rows to write")
    Path(path).write_text(table_text(rows, stable))


def results_as_dicts(rows) -> list:
    return [asdict(r) for r in rows]
