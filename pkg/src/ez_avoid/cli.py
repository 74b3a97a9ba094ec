"""Command-line front end.

Usage::

    ez-avoid --scenario all --out results --format csv,json,svg

Exit codes: 0 when every solve converged, 1 for configuration errors, 2 for
solver failures, 3 for file-system errors.  ``EZ_AVOID_LOG`` selects the log
level (``error``, ``info`` or ``debug``).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import analytic, export, svgplot
from .config import FORMATS, SCENARIOS, RunConfig
from .errors import AllRunsFailed, BadArrivalTime, ConfigError, NumericalFailure, ScenarioInfeasible
from .scenarios import (
    SolveReport,
    chord_is_feasible,
    solve_scenario_a,
    solve_scenario_b,
    solve_scenario_c,
    solve_scenario_d,
    sweep_is_monotone,
    sweep_scenario_c,
)

log = logging.getLogger("ez_avoid")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 1, 2, 3
LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


class _SolverFailed(Exception):
    pass


def _solve(fn, *args, **kwargs) -> SolveReport:
    try:
        return fn(*args, **kwargs)
    except ScenarioInfeasible as exc:
        log.error("%s", exc)
        raise _SolverFailed(exc.report) from exc
    except (NumericalFailure, AllRunsFailed) as exc:
        log.error("solver failure: %s", exc)
        raise _SolverFailed(None) from exc


def solve_all(cfg: RunConfig) -> tuple[dict, dict]:
    """Run the configured scenario(s).

    Returns ``(reports, extras)``: reports keyed by output name, and extra
    summary entries (sweep monotonicity).
    """
    settings = cfg.settings
    reports, extras = {}, {}
    t_a = analytic.scenario_a_time(cfg.x0, cfg.xf, cfg.v)
    wants = {"A", "B", "C", "D"} if cfg.scenario == "all" else {cfg.scenario}

    if "A" in wants:
        reports["scenario_A"] = _solve(solve_scenario_a, cfg.spec("A"), settings)
    b = None
    if wants & {"B", "C", "D", "sweep-C"}:
        b = _solve(solve_scenario_b, cfg.spec("B"), settings)
        if "B" in wants:
            reports["scenario_B"] = b
    t_b = t_a if chord_is_feasible(cfg.spec("B")) else max(b.tf, t_a) if b is not None else None
    if "C" in wants:
        reports["scenario_C"] = _solve(solve_scenario_c, cfg.spec("C"), settings,
                                       warm_starts=[b], bounds=(t_a, t_b))
    if "sweep-C" in wants:
        sweep = _solve(sweep_scenario_c, cfg.spec("C"), cfg.k_sweep, settings, baseline_b=b)
        for rep in sweep:
            reports[f"scenario_C_k{rep.spec.k_ez:g}"] = rep
        extras["sweep"] = {
            "k_ez": [r.spec.k_ez for r in sweep],
            "tf": [r.tf for r in sweep],
            "penalty_integral": [r.penalty_integral for r in sweep],
            **sweep_is_monotone(sweep),
        }
    if "D" in wants:
        reports["scenario_D"] = _solve(solve_scenario_d, cfg.spec("D"), settings, bounds=(t_a, t_b))
    extras["time_bounds"] = [t_a, t_b]
    return reports, extras


def _summary_entry(rep: SolveReport) -> dict:
    return {
        "kind": rep.kind,
        "tf": rep.tf,
        "objective": rep.objective,
        "penalty_integral": rep.penalty_integral,
        "status": rep.status.code,
        "evals": rep.status.evals,
        "terminal_residual": rep.terminal_residual,
        "max_defect": rep.max_defect,
        "max_node_violation": rep.max_node_violation,
        "max_dense_violation": rep.max_dense_violation,
        "arcs": rep.arcs,
        "oracle_checks": rep.oracle_checks,
    }


def write_outputs(cfg: RunConfig, reports: dict, extras: dict) -> list[Path]:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, rep in reports.items():
        if "csv" in cfg.formats:
            written.append(export.write_csv(rep, out / f"{name}_nodes.csv"))
            written.append(export.write_csv(rep, out / f"{name}_dense.csv", dense=True))
        if "json" in cfg.formats:
            written.append(export.write_json(rep, out / f"{name}.json", seed=cfg.seed))
        if "svg" in cfg.formats:
            path = out / f"{name}.svg"
            path.write_text(svgplot.render([rep], title=name.replace("_", " ")), encoding="utf-8")
            written.append(path)
    if "svg" in cfg.formats and cfg.scenario in ("all", "sweep-C") and len(reports) > 1:
        reps = list(reports.values())
        if cfg.scenario == "sweep-C":
            labels = [f"k_ez = {r.spec.k_ez:g}" for r in reps]
            colors = [svgplot.SWEEP_COLORS[i % len(svgplot.SWEEP_COLORS)] for i in range(len(reps))]
            path = out / "sweep_C.svg"
        else:
            labels, colors, path = None, None, out / "all.svg"
        path.write_text(svgplot.render(reps, labels, title=path.stem.replace("_", " "), colors=colors),
                        encoding="utf-8")
        written.append(path)
    summary = {
        "config": cfg.to_dict(),
        "seed": cfg.seed,
        "scenarios": {name: _summary_entry(rep) for name, rep in reports.items()},
        **extras,
    }
    path = out / "summary.json"
    path.write_text(json.dumps(export._jsonable(summary), indent=1, sort_keys=True) + "\n",
                    encoding="utf-8")
    written.append(path)
    return written


def run(cfg: RunConfig) -> int:
    try:
        reports, extras = solve_all(cfg)
    except BadArrivalTime as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except _SolverFailed as exc:
        rep = exc.args[0]
        if rep is not None:
            try:
                write_outputs(cfg, {f"scenario_{rep.kind}_failed": rep}, {})
            except OSError as io_exc:
                log.error("could not write outputs: %s", io_exc)
        return EXIT_SOLVER
    try:
        write_outputs(cfg, reports, extras)
    except OSError as exc:
        log.error("could not write outputs: %s", exc)
        return EXIT_IO
    for name, rep in reports.items():
        log.info("%s: tf=%.10g objective=%.10g status=%s", name, rep.tf, rep.objective, rep.status.code)
    if all(rep.status.converged for rep in reports.values()):
        return EXIT_OK
    return EXIT_SOLVER


def _formats(text: str) -> tuple:
    items = tuple(s.strip() for s in text.split(",") if s.strip())
    bad = [s for s in items if s not in FORMATS]
    if bad or not items:
        raise argparse.ArgumentTypeError(f"formats must come from {','.join(FORMATS)}")
    return items


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ez-avoid",
                                description="Minimum-time and penalty-optimal paths around a cardioid engagement zone.")
    p.add_argument("--config", type=Path, help="JSON run configuration")
    p.add_argument("--scenario", choices=SCENARIOS)
    p.add_argument("--out", dest="output_dir", help="output directory")
    p.add_argument("--seed", type=int)
    p.add_argument("--grid-m", type=int, dest="grid_m", help="number of collocation nodes")
    p.add_argument("--format", type=_formats, dest="formats", help="comma list of csv,json,svg")
    return p


def configure_logging() -> None:
    level = os.environ.get("EZ_AVOID_LOG", "error").strip().lower()
    if level not in LOG_LEVELS:
        raise ConfigError(f"EZ_AVOID_LOG must be one of {', '.join(LOG_LEVELS)}, got {level!r}")
    logging.basicConfig(level=LOG_LEVELS[level], format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger("ez_avoid").setLevel(LOG_LEVELS[level])


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        configure_logging()
        cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
        cfg = cfg.override(scenario=args.scenario, output_dir=args.output_dir, seed=args.seed,
                           grid_m=args.grid_m, formats=args.formats)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
