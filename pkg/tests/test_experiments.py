import textwrap

import numpy as np
import pytest

from elci.core import PerformanceModel, ValidationError
from elci.experiments import (CSV_HEADER, ExperimentConfig, MethodRow,
                              ResultRow, emit_table, estimate_truth,
                              parse_config, run_experiment, table_text)
from elci.models import TrueInputSpec, get_preset

constant = PerformanceModel(lambda x: np.full(x.shape[0], 1.25), (2,),
                            natural_range=(0.0, 2.0), vectorized=True)


def small_mm1_config(**kw):
    p = get_preset("mm1")
    base = dict(name="t", model=p.model, true_spec=p.truth_spec,
                sizes=(30, 25), K=6,
                rows=(MethodRow("bel", r1=1900, r2=50),
                      MethodRow("fel", r1=1900, r2=50),
                      MethodRow("boot", b=50, rb=40),
                      MethodRow("delta", rd=2000)),
                seed=3, truth=p.truth[0], truth_se=p.truth[1], budget=2000)
    base.update(kw)
    return ExperimentConfig(**base)


def test_truth_constant_model():
    spec = TrueInputSpec.exponential([2.0])
    assert estimate_truth(constant, spec, 5000, 0) == (1.25, 0.0)


def test_truth_reproducible_and_chunk_independent_of_workers():
    p = get_preset("san5")
    a = estimate_truth(p.model, p.truth_spec, 20_000, 9, chunk=7000)
    b = estimate_truth(p.model, p.truth_spec, 20_000, 9, chunk=7000)
    assert a == b
    with pytest.raises(ValidationError):
        estimate_truth(p.model, p.truth_spec, 10, 0)


def test_k1_constant_model():
    cfg = ExperimentConfig("c", constant, TrueInputSpec.exponential([1.0]),
                           (5,), 1, (MethodRow("fel", r1=20, r2=5),
                                     MethodRow("boot", b=20, rb=2),
                                     MethodRow("delta", rd=20)),
                           truth=1.25)
    for row in run_experiment(cfg):
        assert (row.coverage, row.mean_len, row.overshoot) == (1.0, 0.0, 0.0)
        assert row.failures == 0


def test_rows_follow_config_order_and_are_deterministic():
    cfg = small_mm1_config()
    a = run_experiment(cfg)
    b = run_experiment(cfg)
    assert [r.method for r in a] == ["BEL", "FEL", "BOOT", "DELTA"]
    assert table_text(a, stable=True) == table_text(b, stable=True)
    for r in a:
        assert 0 <= r.coverage <= 1 and 0 <= r.overshoot <= 1
        assert r.mean_len >= 0 and r.std_len >= 0


def test_workers_do_not_change_results():
    cfg = small_mm1_config(K=5)
    one = table_text(run_experiment(cfg, workers=1), stable=True)
    two = table_text(run_experiment(cfg, workers=2), stable=True)
    assert one == two


def test_bel_never_above_fel_on_shared_pipelines():
    rows = run_experiment(small_mm1_config(K=12))
    assert rows[0].coverage <= rows[1].coverage


def test_failures_are_counted_not_raised():
    cfg = small_mm1_config(rows=(MethodRow("boot", b=5, rb=2),), budget=None)
    (row,) = run_experiment(cfg)
    assert row.failures == cfg.K and row.n == 0


def test_budget_mismatch_rejected():
    with pytest.raises(ValidationError, match="declared budget"):
        small_mm1_config(rows=(MethodRow("fel", r1=1000, r2=50),))


def test_k_zero_rejected():
    with pytest.raises(ValidationError):
        small_mm1_config(K=0)


def test_benchmark_mode_inflates_budgets():
    cfg = small_mm1_config(benchmark=True, benchmark_budget=1000)
    rows = cfg.effective_rows()
    assert rows[0].r1 == rows[0].r2 == 1000
    assert rows[2].rb == 20 and rows[3].rd == 1000


def test_emit_table(tmp_path):
    row = ResultRow("FEL", "R1=1900 R2=50", 0.915, 0.01, 5.06, 2.2, 0.0,
                    0.011, 0, 1000)
    path = tmp_path / "out.csv"
    emit_table([row], path)
    lines = path.read_text().splitlines()
    assert len(lines) == 2
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[1] == "FEL,R1=1900 R2=50,0.915,5.06,2.2,0,0.011,0"
    first = path.read_bytes()
    emit_table([row], path)
    assert path.read_bytes() == first
    with pytest.raises(ValueError):
        emit_table([], path)


CFG = textwrap.dedent("""
    [experiment]
    name = demo
    preset = mm1
    replications = 4
    seed = 5

    [truth]
    value = 2.36

    [row a]
    method = fel
    r1 = 1900
    r2 = 50
""")


def test_parse_config():
    cfg = parse_config(CFG)
    assert cfg.K == 4 and cfg.truth == 2.36 and cfg.budget == 2000
    assert cfg.rows == (MethodRow("fel", r1=1900, r2=50),)


@pytest.mark.parametrize("edit,key", [
    (("replications = 4", "replications = 0"), "replications"),
    (("seed = 5", "sed = 5"), "sed"),
    (("r2 = 50", "r2 = fifty"), "r2"),
    (("method = fel", "method = adaptive"), "adaptive"),
    (("[truth]", "[truth]\nbogus = 1"), "bogus"),
    (("preset = mm1", "preset = mm2"), "mm2"),
])
def test_config_errors_cite_key(edit, key):
    with pytest.raises(ValidationError, match=key):
        parse_config(CFG.replace(*edit))


def test_custom_network_config(tmp_path):
    (tmp_path / "net.txt").write_text("nodes=3 source=1 sink=3\n"
                                      "1 2 0\n2 3 1\n1 3 2\n")
    text = textwrap.dedent("""
        [experiment]
        dag = net.txt
        mode = tail_indicator
        threshold = 1.0
        rates = 2 2 1
        sizes = 10 10 10
        replications = 2

        [truth]
        oracle_n = 10000
        oracle_seed = 1

        [row x]
        method = delta
        rd = 100
    """)
    cfg = parse_config(text, base_dir=tmp_path)
    assert cfg.model.natural_range == (0.0, 1.0)
    assert cfg.truth is None and cfg.truth_N == 10_000
    (row,) = run_experiment(cfg)
    assert row.n == 2


def test_packaged_configs_match_table_layout():
    from elci.cli import data_dir
    from elci.experiments import load_config
    cfg = load_config(data_dir() / "configs" / "table2.cfg")
    assert cfg.K == 200 and cfg.sizes == (120, 100) and cfg.budget == 8000
    params = [(r.method, r.params) for r in cfg.rows]
    el = ["R1=4000 R2=2000", "R1=7000 R2=500", "R1=7800 R2=100",
          "R1=7900 R2=50"]
    assert params == ([("bel", p) for p in el] + [("eel", p) for p in el]
                      + [("fel", p) for p in el]
                      + [("boot", "B=50 R_b=160"), ("boot", "B=100 R_b=80"),
                         ("boot", "B=400 R_b=20"), ("boot", "B=1000 R_b=8"),
                         ("delta", "R_d=8000")])
    for k in range(1, 7):
        desk = load_config(data_dir() / "configs" / f"table{k}.cfg")
        full = load_config(data_dir() / "configs" / f"table{k}_full.cfg")
        assert desk.K == 200 and full.K == 1000
        assert desk.rows == full.rows and len(desk.rows) == 17
        assert desk.truth is not None
