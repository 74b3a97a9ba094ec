import json

import numpy as np
import pytest

from ez_avoid import export, svgplot
from ez_avoid.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, EXIT_SOLVER, main
from ez_avoid.config import RunConfig
from ez_avoid.errors import ConfigError
from ez_avoid.problem import ScenarioSpec
from ez_avoid.scenarios import solve_scenario_a


@pytest.fixture(scope="module")
def report_a():
    return solve_scenario_a(ScenarioSpec("A"))


def _write_cfg(tmp_path, **doc):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(doc))
    return str(p)


# ------------------------------------------------------------------ config


def test_config_defaults_are_the_default_instance():
    cfg = RunConfig()
    assert cfg.x0 == (1.0, 3.0) and cfg.xf == (-0.5, -3.0)
    assert cfg.v == 1.0 and cfg.r_max == 2.0 and cfg.grid_m == 19
    assert RunConfig.from_dict(cfg.to_dict()) == cfg


@pytest.mark.parametrize("doc", [
    {"bogus": 1},
    {"scenario": "E"},
    {"formats": ["png"]},
    {"formats": []},
    {"x0": [1.0]},
    {"x0": [0.0, 0.0]},
    {"v": -1},
    {"seed": -3},
    {"seed": 1.5},
    {"rho_begin": 1e-9},
    {"x0": ["a", "b"]},
    [1, 2],
])
def test_config_rejects(doc):
    with pytest.raises(ConfigError):
        RunConfig.from_dict(doc)


# ------------------------------------------------------------------ CSV / JSON


def test_csv_layout(report_a, tmp_path):
    p = export.write_csv(report_a, tmp_path / "n.csv")
    lines = p.read_text().splitlines()
    assert lines[0] == "t,x,y,psi,d,rho_max,c,g_ez"
    assert len(lines) == 21
    dense = export.write_csv(report_a, tmp_path / "d.csv", dense=True)
    assert len(dense.read_text().splitlines()) == 1002
    table = export.read_csv(p)
    assert table[:, 1:3] == pytest.approx(report_a.states, abs=1e-11)
    assert table[:, 6] == pytest.approx(report_a.node_c, abs=1e-11)
    # twelve significant digits
    assert lines[1].split(",")[3] == "%.12g" % report_a.headings[0]


def test_csv_columns_consistent(report_a):
    t = export.node_table(report_a)
    assert t[:, 4] == pytest.approx(np.hypot(t[:, 1], t[:, 2]), rel=1e-14)
    # c = rho_max - d, and g = rho_max/d - 1 wherever the node is inside
    assert t[:, 6] == pytest.approx(t[:, 5] - t[:, 4], abs=1e-12)
    inside = t[:, 6] > 0
    assert t[inside, 7] == pytest.approx(t[inside, 5] / t[inside, 4] - 1.0, abs=1e-12)
    assert np.all(t[~inside, 7] == 0.0)


def test_json_round_trip(report_a, tmp_path):
    p = export.write_json(report_a, tmp_path / "a.json", seed=7)
    back = export.load_report_json(p)
    for name in ("times", "states", "headings", "node_c", "node_g", "dense_times", "dense_states",
                 "dense_headings", "dense_c", "dense_g"):
        assert np.array_equal(getattr(back, name), getattr(report_a, name)), name
    for name in ("tf", "objective", "penalty_integral", "terminal_residual", "max_defect", "arcs"):
        assert getattr(back, name) == getattr(report_a, name)
    assert back.spec == report_a.spec
    assert back.status == report_a.status
    assert dict(back.oracle_checks) == dict(report_a.oracle_checks)
    doc = json.loads(p.read_text())
    assert doc["metadata"]["seed"] == 7
    assert doc["columns"] == list(export.COLUMNS)


def test_empty_trajectory_rejected(report_a):
    with pytest.raises(ValueError):
        export._table(np.empty(0), np.empty((0, 2)), np.empty(0), np.empty(0), np.empty(0), report_a.spec.ez)


# ------------------------------------------------------------------ SVG


def test_svg_deterministic_and_wellformed(report_a):
    import xml.etree.ElementTree as ET
    a = svgplot.render([report_a], title="A")
    assert a == svgplot.render([report_a], title="A")
    root = ET.fromstring(a)
    assert root.tag.endswith("svg")
    with pytest.raises(ValueError):
        svgplot.render([])


def test_svg_snapshots_only_where_zone_matters(default_b):
    assert len(svgplot.snapshot_nodes(default_b)) == int(np.sum(default_b.node_c >= -1e-4))
    text = svgplot.render([default_b])
    assert text.count('fill-opacity="0.025"') == len(svgplot.snapshot_nodes(default_b))


def test_cardioid_shape():
    pts = svgplot.cardioid(0.0, 2.0)
    r = np.hypot(pts[:, 0], pts[:, 1])
    assert r.max() == pytest.approx(2.0, abs=1e-3)  # reach is greatest behind the heading
    assert pts[np.argmax(r), 0] < 0


# ------------------------------------------------------------------ CLI


def test_cli_scenario_a(tmp_path):
    out = tmp_path / "out"
    assert main(["--scenario", "A", "--out", str(out)]) == EXIT_OK
    rows = (out / "scenario_A_nodes.csv").read_text().splitlines()
    assert len(rows) == 21
    assert len((out / "scenario_A_dense.csv").read_text().splitlines()) == 1002
    summary = json.loads((out / "summary.json").read_text())
    assert summary["scenarios"]["scenario_A"]["tf"] == pytest.approx(6.1847, abs=1e-4)
    assert (out / "scenario_A.svg").exists() and (out / "scenario_A.json").exists()


def test_cli_byte_identical(tmp_path):
    for d in ("r1", "r2"):
        assert main(["--scenario", "A", "--out", str(tmp_path / d), "--seed", "5"]) == EXIT_OK
    for name in ("scenario_A_nodes.csv", "scenario_A_dense.csv", "scenario_A.json", "scenario_A.svg"):
        assert (tmp_path / "r1" / name).read_bytes() == (tmp_path / "r2" / name).read_bytes()


def test_cli_format_and_grid_override(tmp_path):
    out = tmp_path / "o"
    assert main(["--scenario", "A", "--out", str(out), "--format", "csv", "--grid-m", "9"]) == EXIT_OK
    assert sorted(p.name for p in out.iterdir()) == ["scenario_A_dense.csv", "scenario_A_nodes.csv", "summary.json"]
    assert len((out / "scenario_A_nodes.csv").read_text().splitlines()) == 11


def test_cli_config_file(tmp_path):
    cfg = _write_cfg(tmp_path, scenario="A", x0=[3, 3], xf=[3, -3], formats=["json"],
                     output_dir=str(tmp_path / "c"))
    assert main(["--config", cfg]) == EXIT_OK
    rep = export.load_report_json(tmp_path / "c" / "scenario_A.json")
    assert rep.tf == pytest.approx(6.0, abs=1e-6)


@pytest.mark.parametrize("argv", [
    ["--scenario", "Z"],
    ["--format", "csv,png"],
    ["--config", "/nonexistent/cfg.json"],
])
def test_cli_config_errors(argv, tmp_path):
    assert main(argv + ["--out", str(tmp_path)]) == EXIT_CONFIG


def test_cli_unknown_key_and_bad_json(tmp_path):
    assert main(["--config", _write_cfg(tmp_path, scenario="A", extra=1)]) == EXIT_CONFIG
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["--config", str(bad)]) == EXIT_CONFIG


def test_cli_log_env(tmp_path, monkeypatch):
    monkeypatch.setenv("EZ_AVOID_LOG", "loud")
    assert main(["--scenario", "A", "--out", str(tmp_path)]) == EXIT_CONFIG
    monkeypatch.setenv("EZ_AVOID_LOG", "debug")
    assert main(["--scenario", "A", "--out", str(tmp_path), "--format", "csv"]) == EXIT_OK


def test_cli_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["--scenario", "A", "--out", str(blocker / "sub")]) == EXIT_IO


def test_cli_solver_failure(tmp_path):
    cfg = _write_cfg(tmp_path, scenario="A", max_evals=25, output_dir=str(tmp_path / "f"))
    assert main(["--config", cfg]) == EXIT_SOLVER


def test_cli_bad_arrival_time(tmp_path):
    cfg = _write_cfg(tmp_path, scenario="D", t_go=6.0, output_dir=str(tmp_path / "d"))
    assert main(["--config", cfg]) == EXIT_CONFIG


def test_cli_sweep(tmp_path):
    out = tmp_path / "s"
    assert main(["--scenario", "sweep-C", "--out", str(out), "--format", "csv,svg"]) == EXIT_OK
    for k in ("0.1", "1", "10", "100"):
        assert (out / f"scenario_C_k{k}_nodes.csv").exists()
    assert (out / "sweep_C.svg").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["sweep"]["tf_nondecreasing"] and summary["sweep"]["penalty_nonincreasing"]
    assert summary["sweep"]["k_ez"] == [0.1, 1.0, 10.0, 100.0]


def test_cli_all(tmp_path):
    out = tmp_path / "all"
    assert main(["--scenario", "all", "--out", str(out), "--format", "svg"]) == EXIT_OK
    assert (out / "all.svg").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert set(summary["scenarios"]) == {"scenario_A", "scenario_B", "scenario_C", "scenario_D"}
    t_a, t_b = summary["time_bounds"]
    assert t_a <= summary["scenarios"]["scenario_C"]["tf"] <= t_b + 1e-6
