import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drnv import errors
from drnv.cli import (
    CSV_COLUMNS,
    EXIT_DATA,
    EXIT_INFEASIBLE,
    EXIT_OK,
    EXIT_USAGE,
    SweepConfig,
    UsageError,
    emit_report,
    ingest_csv,
    main,
    run_sweep,
    write_samples_csv,
)
from drnv.outer_solver import empirical_cost
from drnv.model import CostParams

SAMPLES = [8.0, 12.0, 10.0, 10.0, 8.0, 12.0, 9.0, 11.0]


def _run(argv):
    buf = io.StringIO()
    code = main(argv, out=buf)
    return code, buf.getvalue()


@pytest.fixture
def data_file(tmp_path):
    p = tmp_path / "demand.csv"
    write_samples_csv(SAMPLES, p)
    return p


# ------------------------------------------------------------------ ingestion
def test_ingest_single_column(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("10\n12\n9\n")
    assert ingest_csv(p).tolist() == [10, 12, 9]


def test_ingest_two_column_header(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("month,units\n2019-01,8.5\n2019-02,9.1\n")
    assert ingest_csv(p).tolist() == [8.5, 9.1]


def test_ingest_comments_and_blanks(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("# demand\n\n1.5  # first\n2.5\n\n")
    assert ingest_csv(p).tolist() == [1.5, 2.5]


@pytest.mark.parametrize("text, line", [("abc\n", 1), ("1\n2\nx\n", 3), ("1\n2,3\n", 2), ("1,2,3\n", 1), ("1\ninf\n", 2)])
def test_ingest_parse_errors(tmp_path, text, line):
    p = tmp_path / "a.csv"
    p.write_text(text)
    with pytest.raises(errors.ParseError) as ei:
        ingest_csv(p)
    assert ei.value.line == line


def test_ingest_empty_and_missing(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("# nothing\n\n")
    with pytest.raises(errors.EmptyFile):
        ingest_csv(p)
    with pytest.raises(FileNotFoundError):
        ingest_csv(tmp_path / "missing.csv")


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 1e6, allow_nan=False, allow_infinity=False), min_size=1, max_size=40))
def test_ingest_round_trip(tmp_path_factory, values):
    p = tmp_path_factory.mktemp("rt") / "s.csv"
    write_samples_csv(values, p)
    assert ingest_csv(p).tolist() == [float(v) for v in values]


# ------------------------------------------------------------------ config
def test_sweep_config_validation():
    with pytest.raises(UsageError):
        SweepConfig(deltas=())
    with pytest.raises(UsageError):
        SweepConfig(deltas=(1.0, 0.5))
    with pytest.raises(UsageError):
        SweepConfig(deltas=(-1.0,))
    with pytest.raises(UsageError):
        SweepConfig(mode="lp")
    with pytest.raises(UsageError):
        SweepConfig(mu=1.0)
    with pytest.raises(UsageError):
        SweepConfig(c1=1, c2=1, p=3, c=2, s=1).cost_params()
    with pytest.raises(UsageError):
        SweepConfig(c1=1).cost_params()
    assert SweepConfig(p=30, c=20, s=10).cost_params() == CostParams(10, 10)


# ------------------------------------------------------------------ sweep / report
def test_sweep_report_files(tmp_path):
    cfg = SweepConfig(samples=tuple(SAMPLES), c1=20, c2=10, out=str(tmp_path))
    table = run_sweep(cfg)
    paths = emit_report(table, tmp_path)
    lines = paths["csv"].read_text().splitlines()
    assert len(lines) == 8
    assert lines[0] == ",".join(CSV_COLUMNS)
    rows = list(csv.DictReader(io.StringIO(paths["csv"].read_text())))
    costs = [float(r["cost"]) for r in rows]
    assert all(b >= a - 1e-4 * (1 + a) for a, b in zip(costs, costs[1:]))
    assert all(r["status"] == "ok" and r["mode"] == "dd" and r["runtime_ms"] == "" for r in rows)
    doc = json.loads(paths["json"].read_text())
    assert doc["scarf"]["delta"] == "inf" and "units" in doc
    assert len(doc["rows"]) == 7 and doc["rows"][0]["report"]["q_star"] >= 0
    svg = paths["svg"].read_text()
    assert svg.count("<polyline") == 2
    assert svg.count("stroke-dasharray") == 2


def test_sweep_delta0_matches_empirical():
    cfg = SweepConfig(samples=tuple(SAMPLES), c1=20, c2=10, deltas=(0.0,))
    row = run_sweep(cfg).rows[0]
    qs = np.linspace(0, 15, 15001)
    emp = min(empirical_cost(SAMPLES, q, CostParams(20, 10)) for q in qs)
    assert row.cost == pytest.approx(emp, rel=1e-5)


def test_failed_row_encoding(tmp_path):
    cfg = SweepConfig(samples=(4.0, 6.0), c1=1, c2=1, mu=8.0, sigma=1.0, deltas=(0.0, 50.0))
    table = run_sweep(cfg)
    assert table.rows[0].status == "failed" and table.rows[0].error_kind == "Infeasible"
    assert table.rows[1].status == "ok"
    paths = emit_report(table, tmp_path)
    rows = list(csv.DictReader(io.StringIO(paths["csv"].read_text())))
    assert rows[0]["cost"] == "NaN" and rows[0]["status"] == "failed"
    assert paths["svg"].read_text().count("<polyline") == 2


def test_sweep_verify_columns(tmp_path):
    cfg = SweepConfig(samples=(3.0, 5.0, 9.0), c1=20, c2=10, deltas=(1.0, 4.0), verify=True)
    table = run_sweep(cfg)
    for r in table.rows:
        assert r.oracle_gap <= 1e-3
        assert r.primal_margin >= -1e-6


def test_sweep_deterministic(tmp_path, data_file):
    outs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        code, _ = _run(["sweep", "--input", str(data_file), "--c1", "20", "--c2", "10",
                        "--delta", "0,2.5,10", "--out", str(d)])
        assert code == EXIT_OK
        outs.append((d / "sweep.csv").read_bytes())
    assert outs[0] == outs[1]


# ------------------------------------------------------------------ commands and exit codes
def test_solve_command(tmp_path, data_file):
    code, text = _run(["solve", "--input", str(data_file), "--c1", "20", "--c2", "10", "--delta", "2.5",
                       "--out", str(tmp_path), "--geometry"])
    assert code == EXIT_OK
    assert "Q*" in text and "cost" in text
    doc = json.loads((tmp_path / "report.json").read_text())
    assert doc["delta"] == 2.5 and doc["report"]["worst_case_cost"] > 0
    assert (tmp_path / "geometry.json").exists()


def test_scarf_command(data_file):
    code, text = _run(["scarf", "--c1", "20", "--c2", "10", "--mu", "10", "--sigma", "2"])
    assert code == EXIT_OK
    assert "Q_scarf    10.7071" in text and "cost_scarf 28.2843" in text
    code, text = _run(["scarf", "--input", str(data_file), "--p", "30", "--c", "20", "--s", "10"])
    assert code == EXIT_OK and "c1=10 c2=10" in text


def test_primal_check_command(tmp_path, data_file):
    code, text = _run(["primal-check", "--input", str(data_file), "--c1", "20", "--c2", "10",
                       "--delta", "2", "--Q", "10", "--m", "60", "--out", str(tmp_path)])
    assert code == EXIT_OK
    vals = {ln.split()[0]: ln.split()[-1] if ln.startswith("dual") else ln.split()[1]
            for ln in text.splitlines() if ln.strip()}
    primal, dual = float(vals["primal"]), float(vals["dual"])
    assert primal <= dual + 1e-6
    assert (tmp_path / "plan.csv").exists()


def test_config_json(tmp_path, data_file):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"input": data_file.name, "c1": 20, "c2": 10, "delta": 2.5}))
    code, text = _run(["solve", "--config", str(cfg)])
    assert code == EXIT_OK
    code, text2 = _run(["solve", "--config", str(cfg), "--delta", "5"])
    assert code == EXIT_OK and "delta      5" in text2


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["solve", "--c1", "20", "--c2", "10", "--delta", "1"],          # no input
        ["sweep", "--c1", "x"],                                         # bad float
        ["solve", "--mode", "lp"],
        ["solve", "--delta", "1,2", "--c1", "1", "--c2", "1", "--input", "{data}"],
        ["solve", "--delta", "1", "--input", "{data}"],                 # no costs
        ["solve", "--delta", "1", "--c1", "1", "--c2", "1", "--input", "{data}", "--mu", "3"],
        ["solve", "--config", "{tmp}/missing.json"],
    ],
)
def test_usage_errors(tmp_path, data_file, argv):
    argv = [a.format(data=data_file, tmp=tmp_path) for a in argv]
    try:
        code, _ = _run(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == EXIT_USAGE


def test_data_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("1\nfoo\n")
    neg = tmp_path / "neg.csv"
    neg.write_text("1\n-2\n")
    base = ["solve", "--c1", "1", "--c2", "1", "--delta", "1", "--input"]
    assert _run(base + [str(bad)])[0] == EXIT_DATA
    assert _run(base + [str(neg)])[0] == EXIT_DATA
    assert _run(base + [str(tmp_path / "missing.csv")])[0] == EXIT_DATA
    assert _run(["scarf", "--p", "30", "--c", "10", "--s", "0", "--mu", "1", "--sigma", "1"])[0] == EXIT_DATA


def test_infeasible_exit(tmp_path):
    p = tmp_path / "d.csv"
    write_samples_csv([4.0, 6.0], p)
    base = ["--input", str(p), "--c1", "1", "--c2", "1", "--mu", "8", "--sigma", "1", "--delta", "0"]
    assert _run(["solve"] + base)[0] == EXIT_INFEASIBLE
    assert _run(["sweep"] + base + ["--out", str(tmp_path / "o")])[0] == EXIT_INFEASIBLE
    assert (tmp_path / "o" / "sweep.csv").exists()


def test_help_exits_zero():
    with pytest.raises(SystemExit) as ei:
        main(["--help"])
    assert ei.value.code == 0
