"""Closed-form strategies and first-order optimality oracles.

Scenario A (ignore the zone) is solved exactly here.  For the other
scenarios these functions do not solve anything by themselves; they are
used to check numerical solutions against the necessary conditions:
constant headings off the zone boundary, the boundary-keeping heading on a
constrained arc, and the Scenario C costate/stationarity relations.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import (
    AmbiguousRoot,
    ArccosDomain,
    ClosedFormDiscrepancy,
    DegenerateBoundary,
    NoBoundaryHeading,
    NonpositiveSpeed,
)
from .geometry import EngagementZone, _guard, constraint_c, penalty_g, wrap_angle

log = logging.getLogger(__name__)

STATIONARITY_TOL = 1e-6


class CostatePair(NamedTuple):
    p_x: float
    p_y: float


@dataclass(frozen=True)
class BoundaryHeadingRoots:
    psi_plus: float
    psi_minus: float
    sigma1: float


def scenario_a_heading(x0, xf) -> float:
    """Constant min-time heading from ``x0`` to ``xf``."""
    dx = float(xf[0]) - float(x0[0])
    dy = float(xf[1]) - float(x0[1])
    if dx == 0.0 and dy == 0.0:
        raise DegenerateBoundary("start and goal coincide")
    return float(wrap_angle(np.arctan2(dy, dx)))


def scenario_a_time(x0, xf, v: float) -> float:
    """Straight-line arrival time ``|xf - x0| / v``."""
    if not v > 0:
        raise NonpositiveSpeed(f"speed must be positive, got {v!r}")
    return float(np.hypot(float(xf[0]) - float(x0[0]), float(xf[1]) - float(x0[1])) / v)


def sigma1(state, ez: EngagementZone) -> float:
    x, y = float(state[0]), float(state[1])
    d2 = x * x + y * y
    return (2.0 * d2 - ez.r_max * np.sqrt(d2)) / ez.r_max


def boundary_heading_roots(state, ez: EngagementZone) -> BoundaryHeadingRoots:
    """Both headings that hold ``state`` exactly on the zone boundary.

    Solves ``x cos(psi) + y sin(psi) + sigma1 = 0`` through the half-angle
    substitution ``tau = tan(psi/2)``, i.e. the roots of
    ``(sigma1 - x) tau**2 + 2 y tau + (sigma1 + x) = 0``.  Each root is taken
    from whichever algebraically equivalent form avoids cancellation, which
    also covers ``sigma1 == x`` (one root drops to the linear equation, the
    other goes to ``psi = pi``).

    Raises
    ------
    NoBoundaryHeading
        If ``d > r_max``: no heading puts the state on the boundary.
    """
    x, y = float(state[0]), float(state[1])
    d = float(np.hypot(x, y))
    _guard(d)
    s1 = sigma1(state, ez)
    disc = y * y - (s1 - x) * (s1 + x)
    if disc < 0.0:
        if disc > -1e-12 * max(d * d, 1.0):
            disc = 0.0
        else:
            raise NoBoundaryHeading(f"no boundary heading at range {d:.6g} > r_max={ez.r_max:g}")
    r = np.sqrt(disc)
    a = s1 - x
    if a == 0.0 and y == 0.0:
        # tangency at (r_max, 0): double root at psi = pi
        return BoundaryHeadingRoots(float(np.pi), float(np.pi), s1)
    with np.errstate(divide="ignore"):
        if y >= 0.0:
            tau_p = -(s1 + x) / (y + r)
            tau_m = (-y - r) / a
        else:
            tau_p = (-y + r) / a
            tau_m = -(s1 + x) / (y - r)
    psi_p = float(wrap_angle(2.0 * np.arctan(tau_p)))
    psi_m = float(wrap_angle(2.0 * np.arctan(tau_m)))
    return BoundaryHeadingRoots(psi_p, psi_m, s1)


def boundary_residual(state, psi, ez: EngagementZone):
    """``x cos(psi) + y sin(psi) + sigma1``; zero for a boundary-keeping heading."""
    x, y = float(state[0]), float(state[1])
    return x * np.cos(psi) + y * np.sin(psi) + sigma1(state, ez)


def select_boundary_root(roots: BoundaryHeadingRoots, travel_direction: float) -> float:
    """Pick the root whose velocity best aligns with ``travel_direction``."""
    ip = np.cos(roots.psi_plus - travel_direction)
    im = np.cos(roots.psi_minus - travel_direction)
    if abs(ip - im) <= 1e-12:
        if abs(ip) <= 1e-12:
            raise AmbiguousRoot("both boundary roots are orthogonal to the travel direction")
        return roots.psi_plus
    return roots.psi_plus if ip > im else roots.psi_minus


def stationarity_residual_c(state, psi, p, v: float, ez: EngagementZone, k_ez: float = 1.0):
    """``dH_C/dpsi`` on the inside-zone branch of the Scenario C Hamiltonian."""
    x, y = float(state[0]), float(state[1])
    d2 = x * x + y * y
    _guard(np.sqrt(d2))
    kk = k_ez * ez.r_max / (2.0 * d2)
    s, c = np.sin(psi), np.cos(psi)
    return -p[0] * v * s + p[1] * v * c + kk * (x * s - y * c)


def _h_inside_c(state, psi, p, v, ez, k_ez):
    # control-dependent part of H_C on the inside branch
    x, y = float(state[0]), float(state[1])
    d2 = x * x + y * y
    kk = k_ez * ez.r_max / (2.0 * d2)
    c, s = np.cos(psi), np.sin(psi)
    return p[0] * v * c + p[1] * v * s - kk * (x * c + y * s)


def stationary_heading_c(state, p, v: float, ez: EngagementZone, k_ez: float = 1.0,
                         n_bracket: int = 64) -> float:
    """Heading minimising the inside-zone Hamiltonian, found by bracketing root search.

    The residual is sampled on ``n_bracket`` intervals over a full turn, every
    sign change is refined with Brent's method, and the root with the lowest
    Hamiltonian is returned.
    """
    def resid(psi):
        return stationarity_residual_c(state, psi, p, v, ez, k_ez)

    grid = np.linspace(-np.pi, np.pi, n_bracket + 1)
    vals = np.array([resid(g) for g in grid])
    roots = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            roots.append(a)
        elif fa * fb < 0.0:
            roots.append(brentq(resid, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))
    if not roots:
        # residual never changes sign: Hamiltonian independent of heading
        return float(wrap_angle(grid[np.argmin([_h_inside_c(state, g, p, v, ez, k_ez) for g in grid])]))
    h = [_h_inside_c(state, r, p, v, ez, k_ez) for r in roots]
    return float(wrap_angle(roots[int(np.argmin(h))]))


def closed_form_candidate_c(state, p, v: float, ez: EngagementZone, variant: str = "C2") -> float:
    """Arccos expressions for the Scenario C interior heading (unverified candidates).

    ``variant="C2"`` is the simplified form, ``"C1"`` the unsimplified one.
    Neither is trusted on its own; see :func:`closed_form_control_c`.
    """
    x, y = float(state[0]), float(state[1])
    px, py = float(p[0]), float(p[1])
    d2 = x * x + y * y
    _guard(np.sqrt(d2))
    R = ez.r_max
    if variant == "C2":
        num = 2.0 * R * x - 4.0 * px * d2
        den = 4.0 * v * v * d2 * (px * px + py * py) + R * R - 4.0 * v * R * (x * px + y * py)
    elif variant == "C1":
        num = R * x / (2.0 * d2) - px * v
        den = v * v * (px * px + py * py) + R / (4.0 * d2) - v * R / d2 * (x * px + y * py)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    if den == 0.0:
        raise ArccosDomain(f"{variant}: zero denominator")
    arg = num / den
    if not -1.0 <= arg <= 1.0:
        raise ArccosDomain(f"{variant}: arccos argument {arg:.6g} outside [-1, 1]")
    return float(np.arccos(arg))


@dataclass(frozen=True)
class ClosedFormCheck:
    """Outcome of checking the closed-form heading candidates.

    ``heading`` is always the root-search heading; the candidates are kept
    (``nan`` when outside the arccos domain) along with their stationarity
    residuals so callers can see which, if any, satisfied the condition.
    """

    heading: float
    candidate_c2: float
    candidate_c1: float
    residual_c2: float
    residual_c1: float
    discrepancy: bool


def closed_form_control_c(state, p, v: float, ez: EngagementZone, k_ez: float = 1.0) -> ClosedFormCheck:
    """Evaluate both closed-form candidates and cross-check them against stationarity.

    A candidate is accepted only if its stationarity residual is below
    ``STATIONARITY_TOL``.  Otherwise a :class:`ClosedFormDiscrepancy` warning is
    emitted (and logged) and the root-search heading is used.
    """
    heading = stationary_heading_c(state, p, v, ez, k_ez)
    cands, resid = {}, {}
    for variant in ("C2", "C1"):
        try:
            cands[variant] = closed_form_candidate_c(state, p, v, ez, variant)
            resid[variant] = abs(float(stationarity_residual_c(state, cands[variant], p, v, ez, k_ez)))
        except ArccosDomain as exc:
            log.debug("closed form %s unusable: %s", variant, exc)
            cands[variant] = float("nan")
            resid[variant] = float("inf")
    discrepancy = not resid["C2"] <= STATIONARITY_TOL
    if discrepancy:
        msg = (f"closed-form heading fails stationarity at state={tuple(map(float, state[:2]))}: "
               f"|res_C2|={resid['C2']:.3g}, |res_C1|={resid['C1']:.3g}; using root search")
        log.warning(msg)
        warnings.warn(msg, ClosedFormDiscrepancy, stacklevel=2)
    return ClosedFormCheck(heading, cands["C2"], cands["C1"], resid["C2"], resid["C1"], discrepancy)


def costate_rates_c(state, psi, ez: EngagementZone, k_ez: float = 1.0):
    """Costate rates ``(-dH_C/dx, -dH_C/dy)`` for Scenario C.

    Zero outside the zone, where the Hamiltonian has no state dependence.
    """
    x, y = float(state[0]), float(state[1])
    if constraint_c(state, psi, ez) < 0.0:
        return 0.0, 0.0
    d2 = x * x + y * y
    d = np.sqrt(d2)
    _guard(d)
    R = k_ez * ez.r_max
    c, s = np.cos(psi), np.sin(psi)
    inner = d - x * c - y * s
    px_dot = R * x / d2**2 * inner - R / (2.0 * d2) * (x / d - c)
    py_dot = R * y / d2**2 * inner - R / (2.0 * d2) * (y / d - s)
    return float(px_dot), float(py_dot)


def hamiltonian(scenario: str, state, psi, p, mu: float = 0.0, v: float = 1.0,
                ez: EngagementZone | None = None, k_ez: float = 1.0,
                active_tol: float = 1e-9) -> float:
    """Hamiltonian of scenario ``"A"``-``"D"``.

    Running costs are ``1 + k_ez * g`` for C (unit time cost plus gained
    penalty) and ``g`` for D, matching ``J_C = t_f + k_ez * int g`` and
    ``J_D = int g``.  For B the multiplier must vanish off the boundary and be
    non-positive on it.
    """
    kin = float(p[0]) * v * np.cos(psi) + float(p[1]) * v * np.sin(psi)
    scenario = scenario.upper()
    if scenario == "A":
        return float(kin)
    if ez is None:
        raise ValueError(f"scenario {scenario} needs an EngagementZone")
    if scenario == "B":
        c = float(constraint_c(state, psi, ez))
        if mu > 0.0:
            raise ValueError("multiplier must be non-positive")
        if mu != 0.0 and c < -active_tol:
            raise ValueError("multiplier must vanish where the constraint is inactive")
        return float(kin + mu * c)
    g = float(penalty_g(state, psi, ez))
    if scenario == "C":
        return float(kin + 1.0 + k_ez * g)
    if scenario == "D":
        return float(kin + g)
    raise ValueError(f"unknown scenario {scenario!r}")
