"""Command-line front end.

Subcommands: ``ci`` (interval from data), ``solve`` (weight programs on
given coefficients), ``experiment`` (coverage study from a config file)
and ``truth`` (Monte Carlo ground truth).

Exit status is 0 on success, 2 on invalid input and 3 when the weight
program cannot be solved.
"""
from __future__ import annotations

import argparse
import configparser
import datetime as _dt
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .ci_methods import (delta_method, el_interval, percentile_bootstrap,
                         run_pipeline)
from .core import InputDataset, SolverError, ValidationError
from .el_solver import solve_weights
from .experiments import (emit_table, estimate_truth, load_config,
                          resolve_truth, results_as_dicts, table_text)
from .models import builtin_specs, get_preset, load_dag, san

EXIT_OK, EXIT_INVALID, EXIT_SOLVER = 0, 2, 3


def data_dir() -> Path:
    return Path(str(resources.files("elci") / "data"))


@dataclass
class RunManifest:
    command: str
    config: dict
    seed: object
    version: str = __version__
    outputs: list = field(default_factory=list)
    wall_time: float = 0.0

    def to_dict(self, stable: bool = False) -> dict:
        doc = {"command": self.command, "config": self.config,
               "seed": self.seed, "version": self.version,
               "outputs": self.outputs}
        if not stable:
            doc["informational"] = {
                "wall_time": self.wall_time,
                "created": _dt.datetime.now(_dt.timezone.utc).isoformat()}
        return doc


def _write_json(path, doc):
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True,
                                     default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


# ---------------------------------------------------------------------------
# data files
# ---------------------------------------------------------------------------

def read_dataset(directory, m: int) -> InputDataset:
    """Read ``model_1.csv .. model_m.csv`` from ``directory``: headerless,
    one observation per line, comma-separated components."""
    directory = Path(directory)
    samples = []
    for i in range(1, m + 1):
        path = directory / f"model_{i}.csv"
        if not path.is_file():
            raise ValidationError(f"missing data file for input model {i}: "
                                  f"{path}")
        try:
            arr = np.loadtxt(path, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise ValidationError(f"{path}: {exc}") from None
        samples.append(arr)
    return InputDataset(samples)


def write_dataset(dataset: InputDataset, directory) -> list:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, s in enumerate(dataset.samples, start=1):
        path = directory / f"model_{i}.csv"
        with open(path, "w") as fh:
            for row in s:
                fh.write(",".join(repr(float(x)) for x in row) + "\n")
        paths.append(str(path))
    return paths


def _resolve_model(spec: str, mode: str, threshold):
    if spec in builtin_specs():
        return get_preset(spec).model, spec
    path = Path(spec)
    if not path.is_file():
        raise ValidationError(
            f"--model {spec!r} is neither a preset ("
            + ", ".join(sorted(builtin_specs())) + ") nor a network file")
    return san(load_dag(path), mode, threshold), None


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_ci(args) -> int:
    t0 = time.perf_counter()
    model, preset = _resolve_model(args.model, args.mode, args.threshold)
    if args.data is None:
        if preset is None:
            raise ValidationError("--data is required for network files")
        args.data = str(data_dir() / "samples" / preset)
    dataset = read_dataset(args.data, model.m)
    method = args.method
    if method in ("bel", "eel", "fel", "lel"):
        state = run_pipeline(model, dataset, args.alpha, args.r1, args.r2,
                             args.seed)
        ci = el_interval(method, state)
        sol = state.solution
        extra = {"weights": {
            "min": [w.tolist() for w in sol.w_min],
            "max": [w.tolist() for w in sol.w_max],
            "min_extremes": [[float(w.min()), float(w.max())]
                             for w in sol.w_min],
            "max_extremes": [[float(w.min()), float(w.max())]
                             for w in sol.w_max]},
            "beta": [sol.beta_min, sol.beta_max]}
    elif method == "boot":
        ci = percentile_bootstrap(model, dataset, args.alpha, args.b, args.rb,
                                  args.seed)
        extra = {}
    else:
        ci = delta_method(model, dataset, args.alpha, args.rd, args.seed)
        extra = {}
    print(f"{ci.lower!r},{ci.upper!r}")
    manifest = RunManifest("ci", {k: v for k, v in vars(args).items()
                                  if k != "func"}, args.seed,
                           outputs=[args.out] if args.out else [],
                           wall_time=time.perf_counter() - t0)
    if args.out:
        doc = {"lower": ci.lower, "upper": ci.upper, "level": ci.level,
               "method": ci.method, "diagnostics": ci.diagnostics, **extra,
               "manifest": manifest.to_dict(args.stable_output)}
        _write_json(args.out, doc)
    return EXIT_OK


def read_coeffs(path) -> list:
    rows = []
    for ln in Path(path).read_text().splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        try:
            rows.append([float(x) for x in ln.split(",")])
        except ValueError:
            raise ValidationError(f"{path}: bad coefficient line {ln!r}")
    if not rows:
        raise ValidationError(f"{path}: no coefficients")
    return rows


def cmd_solve(args) -> int:
    coeffs = read_coeffs(args.coeffs)
    try:
        sol = solve_weights(coeffs, args.alpha)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    if sol.degenerate:
        print(f"degenerate min={sol.obj_min:.10g} max={sol.obj_max:.10g}")
    else:
        print(f"min={sol.obj_min:.10g} max={sol.obj_max:.10g}")
        print(f"beta_min={sol.beta_min:.10g} beta_max={sol.beta_max:.10g}")
        print("lambda_min=" + ",".join(f"{x:.10g}" for x in sol.lambdas_min))
        print("lambda_max=" + ",".join(f"{x:.10g}" for x in sol.lambdas_max))
    if args.out:
        _write_json(args.out, {
            "alpha": args.alpha, "degenerate": sol.degenerate,
            "obj_min": sol.obj_min, "obj_max": sol.obj_max,
            "beta_min": sol.beta_min, "beta_max": sol.beta_max,
            "lambdas_min": sol.lambdas_min, "lambdas_max": sol.lambdas_max,
            "w_min": [w.tolist() for w in sol.w_min],
            "w_max": [w.tolist() for w in sol.w_max]})
    return EXIT_OK


def _config_path(name) -> Path:
    p = Path(name)
    if p.is_file():
        return p
    packaged = data_dir() / "configs" / (name if name.endswith(".cfg")
                                         else name + ".cfg")
    if packaged.is_file():
        return packaged
    raise ValidationError(f"config file not found: {name}")


def cmd_experiment(args) -> int:
    t0 = time.perf_counter()
    path = _config_path(args.config)
    config = resolve_truth(load_config(path))
    if args.replications is not None:
        from dataclasses import replace
        config = replace(config, K=args.replications)
    from .experiments import run_experiment
    rows = run_experiment(config, workers=args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{config.name}.csv"
    emit_table(rows, csv_path, stable=args.stable_output)
    sys.stdout.write(table_text(rows, stable=args.stable_output))
    resolved = dict(config.source)
    resolved["resolved"] = {"K": config.K, "truth": config.truth,
                            "truth_se": config.truth_se,
                            "truth_N": config.truth_N,
                            "truth_seed": config.truth_seed,
                            "alpha": config.alpha, "sizes": config.sizes}
    manifest = RunManifest("experiment", resolved, config.seed,
                           outputs=[csv_path.name],
                           wall_time=time.perf_counter() - t0)
    doc = manifest.to_dict(args.stable_output)
    doc["rows"] = results_as_dicts(rows)
    if args.stable_output:
        for r in doc["rows"]:
            r.pop("secs_per_ci")
    _write_json(out / f"{config.name}.manifest.json", doc)
    return EXIT_OK


def cmd_truth(args) -> int:
    if args.config:
        config = load_config(_config_path(args.config))
        model, spec = config.model, config.true_spec
    else:
        preset = get_preset(args.preset)
        model, spec = preset.model, preset.truth_spec
    value, se = estimate_truth(model, spec, args.n, args.seed)
    print(f"{value!r},{se!r}")
    if args.pin:
        cp = configparser.ConfigParser()
        cp.read(args.pin)
        if "truth" in cp:
            cp.remove_section("truth")
        cp["truth"] = {"value": repr(value), "se": repr(se)}
        with open(args.pin, "w") as fh:
            fh.write(f"# truth pinned from N={args.n} seed={args.seed}\n")
            cp.write(fh)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _alpha(text):
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError("alpha must lie in (0, 1)")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="elci",
        description="Confidence intervals for simulation outputs under "
                    "nonparametric input uncertainty.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ci", help="interval for a model from input data")
    p.add_argument("--model", required=True,
                   help="preset name or network edge-list file")
    p.add_argument("--mode", default="completion_time",
                   choices=("completion_time", "tail_indicator"))
    p.add_argument("--threshold", type=float)
    p.add_argument("--data", help="directory with model_<i>.csv files "
                                  "(defaults to packaged sample data)")
    p.add_argument("--alpha", type=_alpha, default=0.05)
    p.add_argument("--method", default="fel",
                   choices=("bel", "eel", "fel", "lel", "boot", "delta"))
    p.add_argument("--r1", type=_positive_int, default=1900)
    p.add_argument("--r2", type=_positive_int, default=50)
    p.add_argument("--b", type=_positive_int, default=50)
    p.add_argument("--rb", type=_positive_int, default=40)
    p.add_argument("--rd", type=_positive_int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="ci_result.json",
                   help="JSON result document (default: %(default)s)")
    p.add_argument("--stable-output", action="store_true")
    p.set_defaults(func=cmd_ci)

    p = sub.add_parser("solve", help="solve the min/max weight programs")
    p.add_argument("--coeffs", required=True,
                   help="file with one comma-separated line per input model")
    p.add_argument("--alpha", type=_alpha, default=0.05)
    p.add_argument("--out", default="weights.json",
                   help="weights and multipliers as JSON "
                        "(default: %(default)s)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("experiment", help="run a coverage experiment")
    p.add_argument("--config", required=True,
                   help="config file or packaged config name, e.g. table1")
    p.add_argument("--out", default="results")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--replications", type=_positive_int,
                   help="override the configured number of datasets")
    p.add_argument("--stable-output", action="store_true",
                   help="omit timing so reruns are byte-identical")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("truth", help="Monte Carlo truth under the true "
                                     "input laws")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--preset")
    g.add_argument("--config")
    p.add_argument("--n", type=int, default=10_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pin", help="write the value into this config's "
                                 "[truth] section")
    p.set_defaults(func=cmd_truth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SolverError as exc:
        print(f"error: solver failure: {exc}", file=sys.stderr)
        for k, v in exc.diagnostics.items():
            print(f"  {k} = {v}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValidationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
