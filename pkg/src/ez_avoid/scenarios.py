"""The four avoidance problems, transcribed and solved.

=====  ===============================  ===========  ================
kind   objective                        final time   zone treatment
=====  ===============================  ===========  ================
A      ``t_f``                          free         ignored
B      ``t_f``                          free         hard constraint
C      ``t_f + k_ez * int g dt``        free         soft penalty
D      ``int g dt``                     ``t_go``     soft penalty
=====  ===============================  ===========  ================

Each ``solve_scenario_*`` returns an immutable :class:`SolveReport` holding
the node trajectory, a dense resampling, solver status and a dictionary of
named oracle checks comparing the numerical answer with the analytic
results in :mod:`ez_avoid.analytic`.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, NamedTuple, Optional, Sequence

import numpy as np

from . import analytic
from .cobyla import CONVERGED, NlpProblem, SolveStatus, multistart, _better
from .collocation import (
    CollocationGrid,
    DecisionVector,
    build_grid,
    evaluate_constraints,
    evaluate_objective,
    lagrange_interpolate,
    penalty_integral,
    reconstruct_states,
)
from .errors import BadArrivalTime, OriginSingularity, ScenarioInfeasible
from .geometry import EngagementZone, constraint_c, distance, penalty_g, wrap_angle
from .problem import ScenarioSpec

log = logging.getLogger(__name__)

N_DENSE = 1001
ACTIVE_TOL = 1e-4
TOL_EQ = 1e-8
TF_MIN = 1e-3
TF_MAX_FACTOR = 10.0


@dataclass(frozen=True)
class SolverSettings:
    rho_begin: float = 0.5
    rho_end: float = 1e-6
    max_evals: int = 20000
    tol_c: float = 1e-8
    restarts: int = 1
    jitter: float = 0.05
    seed: int = 0


DEFAULT_SETTINGS = SolverSettings()


@dataclass(frozen=True, eq=False)
class SolveReport:
    """Result of one scenario solve.  Arrays are read-only."""

    spec: ScenarioSpec
    times: np.ndarray
    states: np.ndarray
    headings: np.ndarray
    tf: float
    objective: float
    penalty_integral: float
    status: SolveStatus
    node_c: np.ndarray
    node_g: np.ndarray
    dense_times: np.ndarray
    dense_states: np.ndarray
    dense_headings: np.ndarray
    dense_c: np.ndarray
    dense_g: np.ndarray
    terminal_residual: float
    max_defect: float
    oracle_checks: Mapping = field(default_factory=dict)
    arcs: str = ""
    # scenario B only: the node-constrained optimum before midpoint repair
    unrepaired: Optional["SolveReport"] = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "oracle_checks", MappingProxyType(dict(self.oracle_checks)))
        for name in ("times", "states", "headings", "node_c", "node_g", "dense_times",
                     "dense_states", "dense_headings", "dense_c", "dense_g"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def kind(self) -> str:
        return self.spec.kind

    @property
    def max_node_violation(self) -> float:
        return float(np.max(self.node_c))

    @property
    def max_dense_violation(self) -> float:
        return float(np.max(self.dense_c))

    @property
    def decision_vector(self) -> DecisionVector:
        return DecisionVector(self.headings, self.tf)

    def with_checks(self, **checks) -> "SolveReport":
        """Copy of this report with extra oracle checks merged in."""
        return dataclasses.replace(self, oracle_checks={**self.oracle_checks, **checks})


class _Point(NamedTuple):
    headings: np.ndarray
    tf: float


class ScenarioNlp:
    """Packing between NLP vectors and decision vectors for one scenario.

    The NLP vector is ``[psi_0 .. psi_{m-1}, t_f / t_ref]`` (no ``t_f`` entry
    for D).  The heading at the appended endpoint does not enter the
    dynamics or the quadrature, so it is tied to the last collocated heading.

    With ``midpoints=True`` (scenario B only) the zone constraint is also
    imposed at the interpolated state and heading halfway between
    neighbouring support points, which stops the path cutting corners of
    the zone between nodes.
    """

    def __init__(self, spec: ScenarioSpec, grid: CollocationGrid | None = None,
                 midpoints: bool = False):
        self.spec = spec
        self.grid = grid if grid is not None else build_grid(spec.grid_m)
        self.t_ref = analytic.scenario_a_time(spec.x0, spec.xf, spec.v)
        self.free_tf = spec.free_final_time
        self.midpoint_matrix = _midpoint_matrix(self.grid) if midpoints else None

    def unpack(self, z) -> _Point:
        m = self.grid.m
        psi = np.empty(m + 1)
        psi[:m] = z[:m]
        psi[m] = z[m - 1]
        tf = z[m] * self.t_ref if self.free_tf else float(self.spec.t_go)
        return _Point(psi, tf)

    def pack(self, headings, tf) -> np.ndarray:
        psi = np.asarray(headings, dtype=float)[: self.grid.m]
        return np.append(psi, tf / self.t_ref) if self.free_tf else psi.copy()

    def objective(self, z) -> float:
        pt = self.unpack(z)
        if self.spec.kind in ("A", "B"):
            return pt.tf
        try:
            return evaluate_objective(pt, self.spec, self.grid)
        except OriginSingularity:
            return np.nan

    def terminal(self, z):
        pt = self.unpack(z)
        states, _ = reconstruct_states(pt, self.spec, self.grid)
        return states[-1] - np.asarray(self.spec.xf)

    def constraints(self, z):
        pt = self.unpack(z)
        states, _ = reconstruct_states(pt, self.spec, self.grid)
        h = states[-1] - np.asarray(self.spec.xf)
        parts = [h + TOL_EQ, TOL_EQ - h]
        if self.free_tf:
            parts.append([z[self.grid.m] - TF_MIN / self.t_ref, TF_MAX_FACTOR - z[self.grid.m]])
        if self.spec.kind == "B":
            parts.append(self._zone_margin(states, pt.headings))
        return np.concatenate([np.atleast_1d(np.asarray(p, dtype=float)) for p in parts])

    def _zone_margin(self, states, headings):
        pts, psi = states, headings
        if self.midpoint_matrix is not None:
            E = self.midpoint_matrix
            pts = np.vstack((states, E @ states))
            psi = np.concatenate((headings, E @ np.unwrap(headings)))
        try:
            return -np.asarray(constraint_c(pts, psi, self.spec.ez))
        except OriginSingularity:
            return np.full(len(psi), np.nan)

    def problem(self, z0, settings: SolverSettings) -> NlpProblem:
        return NlpProblem(self.objective, z0, self.constraints, settings.rho_begin,
                          settings.rho_end, settings.max_evals, settings.tol_c)


def _midpoint_matrix(grid: CollocationGrid) -> np.ndarray:
    # rows map support-point values to values halfway between support points
    mid = 0.5 * (grid.support[1:] + grid.support[:-1])
    return lagrange_interpolate(grid.support, np.eye(grid.m + 1), mid)


# --------------------------------------------------------------------------
# initial guesses


def straight_line_guess(spec: ScenarioSpec, grid: CollocationGrid):
    """Constant chord heading; ``t_f = t_fA`` (``t_go`` for D)."""
    psi = analytic.scenario_a_heading(spec.x0, spec.xf)
    tf = analytic.scenario_a_time(spec.x0, spec.xf, spec.v) if spec.free_final_time else spec.t_go
    return np.full(grid.m + 1, psi), tf


def chord_is_feasible(spec: ScenarioSpec, n: int = N_DENSE) -> bool:
    x0, xf = np.asarray(spec.x0), np.asarray(spec.xf)
    s = np.linspace(0.0, 1.0, n)[:, None]
    pts = x0 + s * (xf - x0)
    if np.any(distance(pts) <= 1e-9):
        return False
    psi = analytic.scenario_a_heading(spec.x0, spec.xf)
    return bool(np.all(constraint_c(pts, np.full(n, psi), spec.ez) <= 0.0))


def _polyline_headings(points, v, tau):
    legs = np.diff(points, axis=0)
    lengths = np.hypot(legs[:, 0], legs[:, 1])
    total = lengths.sum()
    tf = total / v
    s = (tau + 1.0) * 0.5 * total
    leg = np.minimum(np.searchsorted(np.cumsum(lengths), s, side="right"), len(legs) - 1)
    return np.arctan2(legs[leg, 1], legs[leg, 0]), tf


def detour_guess(spec: ScenarioSpec, grid: CollocationGrid):
    """Single-waypoint detour around the zone.

    The waypoint sits on the perpendicular from the origin to the chord, on
    the side needing the smaller heading deviation, pushed out until the
    whole polyline stays at least ``r_max`` from the origin (where every
    heading is feasible).  ``t_f`` is the polyline length over speed.
    """
    x0, xf = np.asarray(spec.x0), np.asarray(spec.xf)
    u = (xf - x0) / np.linalg.norm(xf - x0)
    foot = x0 - (x0 @ u) * u
    nrm = np.linalg.norm(foot)
    normal = foot / nrm if nrm > 1e-12 else np.array([-u[1], u[0]])
    R = spec.ez.r_max
    chord_heading = np.arctan2(u[1], u[0])

    def deviation(w):
        return abs(wrap_angle(np.arctan2(*(w - x0)[::-1]) - chord_heading))

    side = min((normal, -normal), key=lambda nv: deviation(nv * R))
    s = np.linspace(0.0, 1.0, 200)[:, None]
    r_w = R
    for _ in range(200):
        w = side * r_w
        poly = np.vstack((x0 + s * (w - x0), w + s * (xf - w)))
        if np.min(distance(poly)) >= R:
            break
        r_w *= 1.05
    psi, tf = _polyline_headings(np.vstack((x0, w, xf)), spec.v, grid.support)
    return psi, tf


# --------------------------------------------------------------------------
# report assembly


def _dense(grid, states, headings, tf, ez):
    tau = np.linspace(-1.0, 1.0, N_DENSE)
    dstates = lagrange_interpolate(grid.support, states, tau)
    dpsi = wrap_angle(lagrange_interpolate(grid.support, np.unwrap(headings), tau))
    dt = 0.5 * (tau + 1.0) * tf
    return dt, dstates, dpsi, constraint_c(dstates, dpsi, ez), penalty_g(dstates, dpsi, ez)


def arc_sequence(node_c, tol: float = ACTIVE_TOL) -> str:
    """Run-length labels, ``U`` for inactive and ``C`` for active nodes (e.g. ``"UCU"``)."""
    labels = ["C" if c >= -tol else "U" for c in node_c]
    seq = []
    for lab in labels:
        if not seq or seq[-1] != lab:
            seq.append(lab)
    return "".join(seq)


def active_runs(node_c, tol: float = ACTIVE_TOL):
    runs, start = [], None
    for i, c in enumerate(node_c):
        if c >= -tol and start is None:
            start = i
        elif c < -tol and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(node_c) - 1))
    return runs


def boundary_heading_errors(states, headings, node_c, ez: EngagementZone, tol: float = ACTIVE_TOL):
    """Heading error against the selected closed-form boundary root at interior active nodes."""
    errs = {}
    for a, b in active_runs(node_c, tol):
        for i in range(a + 1, b):
            travel = np.arctan2(*(states[i + 1] - states[i - 1])[::-1])
            try:
                roots = analytic.boundary_heading_roots(states[i], ez)
            except Exception as exc:  # noqa: BLE001 - recorded, not fatal
                log.debug("no boundary root at node %d: %s", i, exc)
                continue
            root = analytic.select_boundary_root(roots, travel)
            errs[i] = abs(float(wrap_angle(headings[i] - root)))
    return errs


def _segment_spread(headings, node_g, tol=0.0):
    # largest heading spread inside one penalty-free run of nodes
    spread, run = 0.0, []
    for psi, gv in zip(np.unwrap(headings), node_g):
        if gv <= tol:
            run.append(psi)
        else:
            if len(run) > 2:
                spread = max(spread, float(np.ptp(run[1:-1])))
            run = []
    if len(run) > 2:
        spread = max(spread, float(np.ptp(run[1:-1])))
    return spread


def build_report(spec: ScenarioSpec, grid: CollocationGrid, headings, tf, status: SolveStatus,
                 oracle_checks: Optional[dict] = None) -> SolveReport:
    headings = np.asarray(wrap_angle(np.asarray(headings, dtype=float)), dtype=float)
    dv = _Point(headings, float(tf))
    states, defects = reconstruct_states(dv, spec, grid)
    res = evaluate_constraints(dv, spec, grid, states, defects)
    node_c = np.asarray(constraint_c(states, headings, spec.ez), dtype=float)
    node_g = np.asarray(penalty_g(states, headings, spec.ez), dtype=float)
    dt, dstates, dpsi, dc, dg = _dense(grid, states, headings, tf, spec.ez)
    checks = dict(oracle_checks or {})
    checks.setdefault("max_defect", float(np.max(np.abs(defects))))
    return SolveReport(
        spec=spec,
        times=0.5 * (grid.support + 1.0) * tf,
        states=states,
        headings=headings,
        tf=float(tf),
        objective=evaluate_objective(dv, spec, grid, states),
        penalty_integral=penalty_integral(dv, spec, grid, states),
        status=status,
        node_c=node_c,
        node_g=node_g,
        dense_times=dt,
        dense_states=dstates,
        dense_headings=dpsi,
        dense_c=dc,
        dense_g=dg,
        terminal_residual=float(np.max(np.abs(res.terminal))),
        max_defect=float(np.max(np.abs(defects))),
        oracle_checks=checks,
        arcs=arc_sequence(node_c) if spec.kind == "B" else "",
    )


# --------------------------------------------------------------------------
# solving


def _run(nlp: ScenarioNlp, starts: Sequence[np.ndarray], settings: SolverSettings):
    """Best solve over the given starting vectors (each with optional jittered restarts)."""
    best = None
    for i, z0 in enumerate(starts):
        prob = nlp.problem(z0, settings)
        x, st = multistart(prob, k=settings.restarts, jitter=settings.jitter, seed=settings.seed + i)
        if best is None or _better(st, best[1], settings.tol_c):
            best = (x, st)
    return best


def _solve_psm(spec: ScenarioSpec, starts, settings: SolverSettings, midpoints: bool = False):
    grid = build_grid(spec.grid_m)
    nlp = ScenarioNlp(spec, grid, midpoints=midpoints)
    packed = [nlp.pack(h, tf) for h, tf in starts]
    z, st = _run(nlp, packed, settings)
    pt = nlp.unpack(z)
    return grid, pt.headings, pt.tf, st


def solve_scenario_a(spec: ScenarioSpec, settings: SolverSettings = DEFAULT_SETTINGS) -> SolveReport:
    """Analytic min-time solution, cross-checked by the collocation pipeline."""
    spec = _as_kind(spec, "A")
    psi_a = analytic.scenario_a_heading(spec.x0, spec.xf)
    tf_a = analytic.scenario_a_time(spec.x0, spec.xf, spec.v)
    grid = build_grid(spec.grid_m)
    grid, psi, tf, st = _solve_psm(spec, [straight_line_guess(spec, grid)], settings)
    rep = build_report(spec, grid, psi, tf, st)
    return rep.with_checks(
        analytic_tf=tf_a,
        analytic_heading=psi_a,
        psm_minus_analytic_tf=tf - tf_a,
        max_heading_deviation=float(np.max(np.abs(wrap_angle(psi - psi_a)))),
        max_chord_deviation=_chord_deviation(spec, rep.states),
    )


def _chord_deviation(spec, states):
    x0, xf = np.asarray(spec.x0), np.asarray(spec.xf)
    u = (xf - x0) / np.linalg.norm(xf - x0)
    rel = states - x0
    return float(np.max(np.abs(rel[:, 0] * u[1] - rel[:, 1] * u[0])))


def solve_scenario_b(spec: ScenarioSpec, settings: SolverSettings = DEFAULT_SETTINGS,
                     dense_limit: Optional[float] = None) -> SolveReport:
    """Min-time path that keeps every node outside the zone.

    If the node-only optimum cuts into the zone between nodes by more than
    ``dense_limit`` (default ``1e-2 * r_max``) on the dense resampling, the
    problem is solved again from that optimum with the constraint also
    imposed at midpoints between nodes.  Both final times are recorded.

    Raises
    ------
    ScenarioInfeasible
        If the solver ends with a node violation above ``settings.tol_c``.
    """
    spec = _as_kind(spec, "B")
    if dense_limit is None:
        dense_limit = 1e-2 * spec.ez.r_max
    grid = build_grid(spec.grid_m)
    starts = [straight_line_guess(spec, grid)] if chord_is_feasible(spec) else [detour_guess(spec, grid)]
    grid, psi, tf, st = _solve_psm(spec, starts, settings)
    rep = build_report(spec, grid, psi, tf, st)
    node_only_tf = rep.tf
    repaired = False
    if st.max_constraint_violation <= settings.tol_c and rep.max_dense_violation > dense_limit:
        log.info("dense violation %.3g above %.3g, adding midpoint constraints",
                 rep.max_dense_violation, dense_limit)
        grid, psi2, tf2, st2 = _solve_psm(spec, [(psi, tf)], settings, midpoints=True)
        if st2.max_constraint_violation <= settings.tol_c:
            rep = dataclasses.replace(build_report(spec, grid, psi2, tf2, st2), unrepaired=rep)
            repaired = True
    errs = boundary_heading_errors(rep.states, rep.headings, rep.node_c, spec.ez)
    rep = rep.with_checks(
        tf_a=analytic.scenario_a_time(spec.x0, spec.xf, spec.v),
        node_only_tf=node_only_tf,
        midpoint_repair=repaired,
        max_node_violation=rep.max_node_violation,
        max_dense_violation=rep.max_dense_violation,
        active_nodes=[i for a, b in active_runs(rep.node_c) for i in range(a, b + 1)],
        boundary_root_errors={str(k): v for k, v in errs.items()},
        boundary_root_max_error=max(errs.values()) if errs else 0.0,
    )
    if rep.status.max_constraint_violation > settings.tol_c:
        raise ScenarioInfeasible(
            f"scenario B ended with violation {rep.status.max_constraint_violation:.3g}", rep)
    return rep


def solve_scenario_c(spec: ScenarioSpec, settings: SolverSettings = DEFAULT_SETTINGS,
                     warm_starts: Sequence = (), bounds: Optional[tuple] = None) -> SolveReport:
    """Min-time path with the zone as a soft penalty of weight ``k_ez``.

    ``warm_starts`` are extra ``(headings, tf)`` (or :class:`SolveReport`)
    starting points tried alongside the straight line; the lowest objective
    wins.  A repaired scenario B report contributes its node-only optimum
    as well.  With ``bounds=(t_fA, t_fB)`` the report records the bracket check.
    """
    spec = _as_kind(spec, "C")
    grid = build_grid(spec.grid_m)
    starts = [straight_line_guess(spec, grid)] + [s for w in warm_starts for s in _as_starts(w)]
    grid, psi, tf, st = _solve_psm(spec, starts, settings)
    rep = build_report(spec, grid, psi, tf, st)
    checks = {
        "tf_a": analytic.scenario_a_time(spec.x0, spec.xf, spec.v),
        "penalty_integral": rep.penalty_integral,
        "outside_heading_spread": _segment_spread(rep.headings, rep.node_g),
    }
    if bounds is not None:
        checks["tf_b"] = bounds[1]
        checks["bracket_ok"] = bool(bounds[0] - 1e-6 <= tf <= bounds[1] + 1e-6)
    return rep.with_checks(**checks)


def sweep_scenario_c(spec: ScenarioSpec, gains: Sequence[float],
                     settings: SolverSettings = DEFAULT_SETTINGS,
                     baseline_b: Optional[SolveReport] = None):
    """Scenario C over increasing gains with continuation.

    Each solve is started from the straight line, the previous gain's
    optimum and (when given) the scenario B optimum.  Returns the reports in
    gain order.
    """
    reports, prev = [], None
    bounds = None
    if baseline_b is not None:
        bounds = (analytic.scenario_a_time(spec.x0, spec.xf, spec.v), baseline_b.tf)
    for k in sorted(gains):
        warm = [w for w in (prev, baseline_b) if w is not None]
        rep = solve_scenario_c(spec.replace(kind="C", k_ez=float(k), t_go=None), settings, warm, bounds)
        reports.append(rep)
        prev = rep
    return reports


def sweep_is_monotone(reports: Sequence[SolveReport], tol: float = 1e-6) -> dict:
    """``tf`` nondecreasing and the penalty integral nonincreasing along a sweep."""
    tfs = [r.tf for r in reports]
    ints = [r.penalty_integral for r in reports]
    return {
        "tf_nondecreasing": all(b >= a - tol for a, b in zip(tfs, tfs[1:])),
        "penalty_nonincreasing": all(b <= a + tol for a, b in zip(ints, ints[1:])),
    }


def solve_scenario_d(spec: ScenarioSpec, settings: SolverSettings = DEFAULT_SETTINGS,
                     bounds: Optional[tuple] = None) -> SolveReport:
    """Least zone penalty for the fixed arrival time ``spec.t_go``.

    ``t_go`` must lie in ``[t_fA, t_fB)``; when ``bounds`` is not given the
    bracket is computed first (which solves scenario B).  ``t_go == t_fA``
    is accepted: the only admissible path is then the chord.
    """
    spec = _as_kind(spec, "D")
    if bounds is None:
        bounds = compute_time_bounds(spec, settings)
    t_a, t_b = bounds
    at_min = abs(spec.t_go - t_a) <= 1e-9 * t_a
    if not (at_min or t_a <= spec.t_go < t_b):
        raise BadArrivalTime(f"t_go={spec.t_go:.6g} outside [{t_a:.6g}, {t_b:.6g})")
    grid = build_grid(spec.grid_m)
    start = straight_line_guess(spec, grid)
    if at_min:
        # arriving in the minimum time leaves the chord as the only admissible path
        rep = build_report(spec, grid, start[0], spec.t_go, SolveStatus(CONVERGED, 0, 0.0, 0.0))
        rep = dataclasses.replace(rep, status=SolveStatus(
            CONVERGED, 0, 0.0, rep.terminal_residual, rep.objective))
    else:
        grid, psi, tf, st = _solve_psm(spec, [start], settings)
        rep = build_report(spec, grid, psi, tf, st)
    return rep.with_checks(
        straight_line_shortcut=at_min,
        tf_a=t_a,
        tf_b=t_b,
        initial_guess_objective=evaluate_objective(_Point(*start), spec, grid),
        heading_spread=float(np.ptp(np.unwrap(rep.headings))),
    )


def compute_time_bounds(spec: ScenarioSpec, settings: SolverSettings = DEFAULT_SETTINGS):
    """``(t_fA, t_fB)``: straight-line time and the scenario B optimum."""
    t_a = analytic.scenario_a_time(spec.x0, spec.xf, spec.v)
    if chord_is_feasible(spec):
        return t_a, t_a
    rep_b = solve_scenario_b(spec.replace(kind="B", t_go=None), settings)
    return t_a, max(rep_b.tf, t_a)


def _as_kind(spec: ScenarioSpec, kind: str) -> ScenarioSpec:
    if spec.kind != kind:
        raise ValueError(f"expected a scenario {kind} spec, got kind={spec.kind}")
    return spec


def _as_starts(w):
    if isinstance(w, SolveReport):
        out = [(np.unwrap(w.headings), w.tf)]
        if w.unrepaired is not None:
            out.append((np.unwrap(w.unrepaired.headings), w.unrepaired.tf))
        return out
    return [w]
