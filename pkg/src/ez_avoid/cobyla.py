"""Derivative-free constrained optimisation by linear approximation.

A COBYLA-style method: linear models of the objective and of every
constraint are interpolated on an ``(n+1)``-point simplex, each iteration
solves a trust-region linear program for a step, and a merit function
``f + mu * max_violation`` decides which vertex the trial point replaces.
The trust radius ``rho`` only ever shrinks, from ``rho_begin`` to ``rho_end``.

Constraints are ``c(x) >= 0``.  Equalities are passed as paired
inequalities, see :func:`equality_as_inequalities`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import AllRunsFailed, NumericalFailure

log = logging.getLogger(__name__)

CONVERGED = "Converged"
MAX_EVALS = "MaxEvals"
INFEASIBLE = "Infeasible"
NUMERICAL_FAILURE = "NumericalFailure"

# simplex acceptability and step-size constants
PARSIG = 0.25
PARBET = 2.1
GAMMA = 0.5
DELTA = 1.1

BARRIER = 1e30  # replaces non-finite function values

ConstraintSpec = Union[None, Callable[[np.ndarray], np.ndarray], Sequence[Callable[[np.ndarray], float]]]


@dataclass
class NlpProblem:
    """Objective, constraints (``>= 0`` feasible) and solver settings."""

    objective: Callable[[np.ndarray], float]
    initial_point: np.ndarray
    inequality_constraints: ConstraintSpec = None
    rho_begin: float = 0.5
    rho_end: float = 1e-6
    max_evals: int = 20000
    tol_c: float = 1e-8

    def __post_init__(self):
        self.initial_point = np.atleast_1d(np.asarray(self.initial_point, dtype=float)).copy()
        if self.dimension < 1:
            raise ValueError("problem needs at least one variable")
        if not 0 < self.rho_end < self.rho_begin:
            raise ValueError("need 0 < rho_end < rho_begin")
        if self.max_evals < self.dimension + 2:
            raise ValueError("max_evals must be at least dimension + 2")

    @property
    def dimension(self) -> int:
        return self.initial_point.size


@dataclass
class SolveStatus:
    code: str
    evals: int
    final_rho: float
    max_constraint_violation: float
    objective: float = float("nan")
    restarts: int = 0
    rho_history: list = field(default_factory=list, repr=False)
    incumbent_violations: list = field(default_factory=list, repr=False)

    @property
    def converged(self) -> bool:
        return self.code == CONVERGED


def equality_as_inequalities(h: Callable[[np.ndarray], np.ndarray], tol_eq: float = 1e-8):
    """Turn ``h(x) = 0`` into ``h + tol_eq >= 0`` and ``tol_eq - h >= 0``."""

    def paired(x):
        hv = np.atleast_1d(h(x))
        return np.concatenate((hv + tol_eq, tol_eq - hv))

    return paired


def _constraint_function(spec: ConstraintSpec):
    if spec is None:
        return lambda x: np.empty(0)
    if callable(spec):
        return lambda x: np.atleast_1d(np.asarray(spec(x), dtype=float))
    funcs = list(spec)
    return lambda x: np.array([float(f(x)) for f in funcs])


def _sanitize(f, c):
    f = float(f)
    if not np.isfinite(f):
        f = BARRIER if not f < 0 else -BARRIER
    if c.size and not np.all(np.isfinite(c)):
        c = np.where(np.isnan(c), -BARRIER, np.clip(c, -BARRIER, BARRIER))
    return f, c


# --------------------------------------------------------------------------
# trust-region subproblem


def _active_set_path(q, M, h, y, delta, nball, max_iter):
    """Descend ``q . y`` subject to ``M y >= h`` from a feasible ``y``.

    Moves along the projected steepest-descent direction, adding blocking
    constraints and dropping ones with negative multipliers, and stops as
    soon as the path meets the ball ``|y[:nball]| <= delta``.  Returns the
    final point and whether it lies on the ball.
    """
    scale = 1.0 + np.abs(h)
    slack = M @ y - h
    W = [int(i) for i in np.flatnonzero(slack <= 1e-13 * scale)]
    qn = np.linalg.norm(q)
    for _ in range(max_iter):
        if W:
            MW = M[W]
            lam = np.linalg.lstsq(MW.T, q, rcond=None)[0]
            s = MW.T @ lam - q
        else:
            lam = np.empty(0)
            s = -q
        sn = np.linalg.norm(s)
        if sn <= 1e-12 * qn:
            if W and lam.min() < -1e-14 * qn:
                W.pop(int(np.argmin(lam)))
                continue
            return y, False
        Ms = M @ s
        slack = np.maximum(M @ y - h, 0.0)
        blocking = Ms < -1e-14 * sn * (1.0 + np.linalg.norm(M, axis=1))
        if W:
            blocking[W] = False
        alpha_c, jnew = np.inf, -1
        if blocking.any():
            idx = np.flatnonzero(blocking)
            ratios = slack[idx] / -Ms[idx]
            k = int(np.argmin(ratios))
            alpha_c, jnew = ratios[k], int(idx[k])
        yd, sd = y[:nball], s[:nball]
        ss = sd @ sd
        if ss > 0.0:
            ys = yd @ sd
            room = max(delta * delta - yd @ yd, 0.0)
            alpha_b = (room) / (ys + np.sqrt(ys * ys + ss * room)) if ys >= 0 else \
                (-ys + np.sqrt(ys * ys + ss * room)) / ss
        else:
            alpha_b = np.inf
        if alpha_b <= alpha_c:
            return y + alpha_b * s, True
        if not np.isfinite(alpha_c):
            # direction leaves the ball through the non-ball coordinates only
            return y, False
        y = y + alpha_c * s
        W.append(jnew)
    return y, False


def trust_region_step(g, A, c, delta):
    """Approximate minimiser of the linearised problem inside ``|d| <= delta``.

    Stage one reduces the largest linearised violation ``max(0, -(c + A d))``;
    if that ends strictly inside the ball, stage two reduces ``g . d`` while
    keeping every linearised constraint at least as satisfied as stage one
    left it.
    """
    n = g.size
    m = c.size
    max_iter = 4 * (n + m) + 20
    d = np.zeros(n)
    t = 0.0
    if m:
        t0 = max(0.0, float(np.max(-c)))
        if t0 > 0.0:
            M = np.vstack((np.hstack((A, np.ones((m, 1)))), np.append(np.zeros(n), 1.0)))
            h = np.append(-c, 0.0)
            q = np.append(np.zeros(n), 1.0)
            y, on_ball = _active_set_path(q, M, h, np.append(d, t0), delta, n, max_iter)
            d, t = y[:n], max(float(y[n]), 0.0)
            t = max(t, float(np.max(-(c + A @ d))), 0.0)
            if on_ball:
                return d
    if not np.any(g):
        return d
    if m:
        d, _ = _active_set_path(g, A, -(c + t), d, delta, n, max_iter)
    else:
        gn = np.linalg.norm(g)
        d = -delta * g / gn
    return d


# --------------------------------------------------------------------------
# main iteration


class _Budget(Exception):
    pass


class _Solver:
    def __init__(self, problem: NlpProblem, record: bool):
        self.p = problem
        self.fun = problem.objective
        self.cons = _constraint_function(problem.inequality_constraints)
        self.n = problem.dimension
        self.evals = 0
        self.record = record
        self.hist_x, self.hist_f, self.hist_r = [], [], []
        self.best_feasible = None

    def evaluate(self, x):
        if self.evals >= self.p.max_evals:
            raise _Budget
        self.evals += 1
        f = self.fun(x)
        c = self.cons(x)
        f, c = _sanitize(f, c)
        r = max(0.0, float(np.max(-c))) if c.size else 0.0
        if r <= self.p.tol_c and (self.best_feasible is None or f < self.best_feasible[1]):
            self.best_feasible = (x.copy(), f, r)
        if self.record:
            self.hist_x.append(x.copy())
            self.hist_f.append(f)
            self.hist_r.append(r)
        return f, c, r

    def start_point(self, x0):
        rng = np.random.default_rng(0)
        x = x0.copy()
        for _ in range(10):
            f, c, r = self.evaluate(x)
            if abs(f) < BARRIER and (not c.size or np.all(np.abs(c) < BARRIER)):
                return x, f, c, r
            x = x0 + self.p.rho_begin * rng.uniform(-1.0, 1.0, size=x0.size)
        raise NumericalFailure("no finite starting point found within 10 perturbations")

    def build_simplex(self, xb, fb, cb, rb, rho):
        n = self.n
        self.xb = xb
        self.sim = rho * np.eye(n)
        self.F = np.empty(n + 1)
        self.C = np.empty((n + 1, cb.size))
        self.R = np.empty(n + 1)
        self.F[n], self.C[n], self.R[n] = fb, cb, rb
        for j in range(n):
            self.F[j], self.C[j], self.R[j] = self.evaluate(xb + self.sim[:, j])
        self.simi = np.eye(n) / rho

    def refresh_inverse(self):
        try:
            simi = np.linalg.inv(self.sim)
        except np.linalg.LinAlgError:
            return False
        err = np.max(np.abs(simi @ self.sim - np.eye(self.n)))
        if not np.isfinite(err) or err > 1e-3:
            return False
        self.simi = simi
        return True

    def select_best(self, parmu):
        n = self.n
        phi = self.F + parmu * self.R
        best = n
        for j in range(n):
            if phi[j] < phi[best] or (phi[j] == phi[best] and parmu == 0.0 and self.R[j] < self.R[best]):
                best = j
        if best == n:
            return False
        shift = self.sim[:, best].copy()
        self.xb = self.xb + shift
        self.sim -= shift[:, None]
        self.sim[:, best] = -shift
        for arr in (self.F, self.R):
            arr[best], arr[n] = arr[n], arr[best]
        self.C[[best, n]] = self.C[[n, best]]
        if not self.refresh_inverse():
            raise NumericalFailure("singular simplex after vertex swap")
        return True

    def models(self):
        n = self.n
        g = (self.F[:n] - self.F[n]) @ self.simi
        A = (self.C[:n] - self.C[n]).T @ self.simi
        return g, A

    def replace_vertex(self, j, dx, f, c, r):
        self.sim[:, j] = dx
        self.F[j], self.C[j], self.R[j] = f, c, r


def solve(problem: NlpProblem, record_history: bool = True):
    """Minimise ``problem.objective`` subject to its constraints.

    Returns
    -------
    x : ndarray
    status : SolveStatus

    Raises
    ------
    NumericalFailure
        If no finite start exists or the simplex degenerates beyond repair.
    """
    S = _Solver(problem, record_history)
    n = S.n
    rho = problem.rho_begin
    rho_end = problem.rho_end
    parmu = 0.0
    restarts = 0
    code = None
    rho_hist = [rho]
    inc_viol = []
    least_violated = None

    xb, fb, cb, rb = S.start_point(problem.initial_point)
    try:
        S.build_simplex(xb, fb, cb, rb, rho)
        force_tr = False
        while True:
            S.select_best(parmu)
            inc_viol.append(S.R[n])
            if least_violated is None or S.R[n] < least_violated[2]:
                least_violated = (S.xb.copy(), S.F[n], S.R[n])
            vsig = 1.0 / np.linalg.norm(S.simi, axis=1)
            veta = np.linalg.norm(S.sim, axis=0)
            acceptable = bool(np.all(vsig >= PARSIG * rho) and np.all(veta <= PARBET * rho))
            g, A = S.models()

            if not acceptable and not force_tr:
                # geometry step: replace the vertex that spoils the simplex most
                if np.any(veta > PARBET * rho):
                    jdrop = int(np.argmax(veta))
                else:
                    jdrop = int(np.argmin(vsig))
                dx = GAMMA * rho * vsig[jdrop] * S.simi[jdrop]
                cb = S.C[n]
                vp = max(0.0, float(np.max(-(cb + A @ dx)))) if cb.size else 0.0
                vm = max(0.0, float(np.max(-(cb - A @ dx)))) if cb.size else 0.0
                if parmu * vp + g @ dx > parmu * vm - g @ dx:
                    dx = -dx
                f, c, r = S.evaluate(S.xb + dx)
                S.replace_vertex(jdrop, dx, f, c, r)
                if not S.refresh_inverse():
                    restarts = _restart(S, rho, restarts)
                force_tr = True
                continue
            force_tr = False

            d = trust_region_step(g, A, S.C[n], rho)
            dn = np.linalg.norm(d)
            improved = False
            if dn >= 0.5 * rho:
                cb = S.C[n]
                if cb.size:
                    resnew = max(0.0, float(np.max(-(cb + A @ d))))
                else:
                    resnew = 0.0
                prerec = S.R[n] - resnew
                dfpred = float(g @ d)
                barmu = dfpred / prerec if prerec > 0.0 else 0.0
                if parmu < 1.5 * barmu:
                    parmu = 2.0 * barmu
                    phi = S.F + parmu * S.R
                    if np.min(phi[:n]) < phi[n]:
                        continue
                prerem = parmu * prerec - dfpred
                f, c, r = S.evaluate(S.xb + d)
                if parmu == 0.0 and f == S.F[n]:
                    prerem = prerec
                    trured = S.R[n] - r
                else:
                    trured = (S.F[n] + parmu * S.R[n]) - (f + parmu * r)

                # choose the vertex the trial point replaces
                proj = np.abs(S.simi @ d)
                ratio = 1.0 if trured <= 0.0 else 0.0
                jdrop = -1
                for j in range(n):
                    if proj[j] > ratio:
                        jdrop, ratio = j, proj[j]
                sigbar = proj * vsig
                edgmax = DELTA * rho
                ell = -1
                for j in range(n):
                    if sigbar[j] >= PARSIG * rho or sigbar[j] >= vsig[j]:
                        if trured > 0.0:
                            edge = np.linalg.norm(d - S.sim[:, j])
                        else:
                            edge = veta[j]
                        if edge > edgmax:
                            ell, edgmax = j, edge
                if ell >= 0:
                    jdrop = ell
                if jdrop >= 0:
                    S.replace_vertex(jdrop, d, f, c, r)
                    if not S.refresh_inverse():
                        restarts = _restart(S, rho, restarts)
                improved = trured > 0.0 and trured >= 0.1 * prerem

            if improved:
                continue
            if not acceptable:
                continue
            if rho <= rho_end:
                break
            rho = 0.5 * rho
            if rho <= 1.5 * rho_end:
                rho = rho_end
            rho_hist.append(rho)
            parmu = _reset_parmu(S, parmu)
    except _Budget:
        code = MAX_EVALS

    # final selection: the lowest objective among evaluated points that are
    # feasible to tol_c; failing that, the least violated incumbent
    S.select_best(parmu)
    x, f, r = S.xb.copy(), S.F[n], S.R[n]
    tol = problem.tol_c
    if S.best_feasible is not None and (r > tol or S.best_feasible[1] < f):
        x, f, r = S.best_feasible
    elif r > tol and least_violated is not None and least_violated[2] < r:
        x, f, r = least_violated
    if code is None:
        code = CONVERGED if r <= tol else INFEASIBLE
    status = SolveStatus(code, S.evals, rho, r, f, restarts,
                         rho_hist if record_history else [],
                         inc_viol if record_history else [])
    log.debug("solve: %s after %d evals, rho=%.3g, f=%.10g, viol=%.3g", code, S.evals, rho, f, r)
    return x, status


def _restart(S, rho, restarts, max_restarts=3):
    restarts += 1
    if restarts > max_restarts:
        raise NumericalFailure("simplex degenerated repeatedly")
    log.debug("rebuilding degenerate simplex (restart %d)", restarts)
    n = S.n
    S.build_simplex(S.xb, S.F[n], S.C[n].copy(), S.R[n], rho)
    return restarts


def _reset_parmu(S, parmu):
    if parmu <= 0.0:
        return parmu
    m = S.C.shape[1]
    denom = 0.0
    cmin = cmax = 0.0
    for k in range(m + 1):
        col = S.C[:, k] if k < m else S.F
        cmin, cmax = float(np.min(col)), float(np.max(col))
        if k < m and cmin < 0.5 * cmax:
            temp = max(cmax, 0.0) - cmin
            denom = temp if denom <= 0.0 else min(denom, temp)
    if denom == 0.0:
        return 0.0
    if cmax - cmin < parmu * denom:
        return (cmax - cmin) / denom
    return parmu


def multistart(problem: NlpProblem, k: int = 1, jitter: float = 0.1, seed: int = 0):
    """Best of ``k`` solves; run 0 uses the given start, the others a jittered copy.

    "Best" means lowest objective among runs within ``tol_c`` of feasibility,
    or lowest violation when none are.  Deterministic for a fixed ``seed``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = np.random.default_rng(seed)
    x0 = problem.initial_point
    best = None
    for i in range(k):
        start = x0 if i == 0 else x0 + rng.uniform(-jitter, jitter, size=x0.size)
        trial = NlpProblem(problem.objective, start, problem.inequality_constraints,
                           problem.rho_begin, problem.rho_end, problem.max_evals, problem.tol_c)
        try:
            x, st = solve(trial)
        except NumericalFailure as exc:
            log.info("multistart run %d failed: %s", i, exc)
            continue
        if best is None or _better(st, best[1], problem.tol_c):
            best = (x, st)
    if best is None:
        raise AllRunsFailed(f"all {k} runs failed")
    return best


def _better(a: SolveStatus, b: SolveStatus, tol: float) -> bool:
    fa, fb = a.max_constraint_violation <= tol, b.max_constraint_violation <= tol
    if fa != fb:
        return fa
    if fa:
        return a.objective < b.objective
    return a.max_constraint_violation < b.max_constraint_violation
