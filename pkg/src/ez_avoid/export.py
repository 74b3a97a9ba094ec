"""Trajectory files: CSV tables, JSON documents and their loader.

Both node and dense tables share the columns ``t, x, y, psi, d, rho_max, c,
g_ez``.  CSV values carry 12 significant digits; JSON keeps full double
precision so :func:`load_report_json` rebuilds an identical report.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .cobyla import SolveStatus
from .geometry import EngagementZone, aspect_angle, distance, rho_max
from .problem import ScenarioSpec
from .scenarios import SolveReport

COLUMNS = ("t", "x", "y", "psi", "d", "rho_max", "c", "g_ez")


def _table(times, states, headings, c, g, ez):
    states = np.asarray(states)
    if states.shape[0] == 0:
        raise ValueError("empty trajectory")
    d = distance(states)
    rho = rho_max(aspect_angle(states, headings), ez)
    return np.column_stack((times, states[:, 0], states[:, 1], headings, d, rho, c, g))


def node_table(report: SolveReport) -> np.ndarray:
    return _table(report.times, report.states, report.headings, report.node_c,
                  report.node_g, report.spec.ez)


def dense_table(report: SolveReport) -> np.ndarray:
    return _table(report.dense_times, report.dense_states, report.dense_headings,
                  report.dense_c, report.dense_g, report.spec.ez)


def _fmt(v: float) -> str:
    return "%.12g" % (v + 0.0)  # + 0.0 folds -0.0 into 0


def csv_text(table: np.ndarray) -> str:
    lines = [",".join(COLUMNS)]
    lines += [",".join(_fmt(v) for v in row) for row in table]
    return "\n".join(lines) + "\n"


def write_csv(report: SolveReport, path, dense: bool = False) -> Path:
    path = Path(path)
    table = dense_table(report) if dense else node_table(report)
    path.write_text(csv_text(table), encoding="utf-8")
    return path


def read_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


# --------------------------------------------------------------------------
# JSON


def spec_to_dict(spec: ScenarioSpec) -> dict:
    return {
        "kind": spec.kind,
        "x0": list(spec.x0),
        "xf": list(spec.xf),
        "v": spec.v,
        "r_max": spec.ez.r_max,
        "k_ez": spec.k_ez,
        "t_go": spec.t_go,
        "grid_m": spec.grid_m,
    }


def spec_from_dict(d: dict) -> ScenarioSpec:
    return ScenarioSpec(kind=d["kind"], x0=tuple(d["x0"]), xf=tuple(d["xf"]), v=d["v"],
                        ez=EngagementZone(d["r_max"]), k_ez=d["k_ez"], t_go=d["t_go"],
                        grid_m=d["grid_m"])


def status_to_dict(st: SolveStatus) -> dict:
    return {
        "code": st.code,
        "evals": int(st.evals),
        "final_rho": float(st.final_rho),
        "max_constraint_violation": float(st.max_constraint_violation),
        "objective": _jsonable(st.objective),
        "restarts": int(st.restarts),
        "rho_history": [float(r) for r in st.rho_history],
        "incumbent_violations": [float(r) for r in st.incumbent_violations],
    }


def _jsonable(v):
    # numpy scalars and containers to plain JSON types; non-finite floats to strings
    if isinstance(v, dict) or hasattr(v, "items"):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    return v


def _float(v):
    return float(v) if isinstance(v, str) else v


def report_to_dict(report: SolveReport, seed: int | None = None) -> dict:
    nodes, dense = node_table(report), dense_table(report)
    return {
        "columns": list(COLUMNS),
        "nodes": {k: nodes[:, i].tolist() for i, k in enumerate(COLUMNS)},
        "dense": {k: dense[:, i].tolist() for i, k in enumerate(COLUMNS)},
        "metadata": {
            "spec": spec_to_dict(report.spec),
            "status": status_to_dict(report.status),
            "seed": seed,
            "tf": report.tf,
            "objective": _jsonable(report.objective),
            "penalty_integral": report.penalty_integral,
            "terminal_residual": report.terminal_residual,
            "max_defect": report.max_defect,
            "arcs": report.arcs,
            "oracle_checks": _jsonable(report.oracle_checks),
        },
    }


def json_text(report: SolveReport, seed: int | None = None) -> str:
    return json.dumps(report_to_dict(report, seed), indent=1, sort_keys=True) + "\n"


def write_json(report: SolveReport, path, seed: int | None = None) -> Path:
    path = Path(path)
    path.write_text(json_text(report, seed), encoding="utf-8")
    return path


def report_from_dict(doc: dict) -> SolveReport:
    """Rebuild a report from :func:`report_to_dict` output.

    The node-only predecessor of a repaired scenario B report is not stored.
    """
    meta = doc["metadata"]
    n, dn = doc["nodes"], doc["dense"]
    st = dict(meta["status"])
    st["objective"] = _float(st["objective"])
    return SolveReport(
        spec=spec_from_dict(meta["spec"]),
        times=n["t"],
        states=np.column_stack((n["x"], n["y"])),
        headings=n["psi"],
        tf=meta["tf"],
        objective=_float(meta["objective"]),
        penalty_integral=meta["penalty_integral"],
        status=SolveStatus(**st),
        node_c=n["c"],
        node_g=n["g_ez"],
        dense_times=dn["t"],
        dense_states=np.column_stack((dn["x"], dn["y"])),
        dense_headings=dn["psi"],
        dense_c=dn["c"],
        dense_g=dn["g_ez"],
        terminal_residual=meta["terminal_residual"],
        max_defect=meta["max_defect"],
        oracle_checks=meta["oracle_checks"],
        arcs=meta["arcs"],
    )


def load_report_json(path) -> SolveReport:
    return report_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
