"""Legendre-Gauss-Radau transcription of the heading-control problem.

The trajectory on ``[0, t_f]`` is mapped to ``tau in [-1, 1]``.  States are a
degree-``m`` polynomial through the ``m`` LGR nodes plus the appended
endpoint ``tau = +1``; the dynamics are collocated at the ``m`` LGR nodes.
Given the headings and ``t_f`` the collocation equations are linear in the
states, so the states are eliminated by one matrix product with the
integration matrix and the NLP only sees headings and ``t_f``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import GridBuildFailure
from .geometry import constraint_c, penalty_g
from .problem import ScenarioSpec


@dataclass(frozen=True, eq=False)
class CollocationGrid:
    """LGR nodes, weights and the differentiation operator.

    Attributes
    ----------
    nodes : ndarray, shape (m,)
        LGR nodes in ``[-1, 1)``, ``nodes[0] == -1``.
    weights : ndarray, shape (m,)
        Quadrature weights, summing to 2.
    support : ndarray, shape (m + 1,)
        ``nodes`` with the endpoint ``+1`` appended.
    diff_matrix : ndarray, shape (m + 1, m + 1)
        Derivative of the interpolating polynomial over ``support``, evaluated
        at ``support``.
    integration : ndarray, shape (m, m)
        Inverse of ``diff_matrix[:m, 1:]``.  Its last row equals ``weights``.
    """

    m: int
    nodes: np.ndarray
    weights: np.ndarray
    support: np.ndarray
    diff_matrix: np.ndarray
    integration: np.ndarray
    endpoint: float = 1.0


def _legendre_pair(x, n):
    """P_{n-1}(x), P_n(x) and P_n'(x) by the three-term recurrence."""
    p_prev = np.ones_like(x)
    p = x.copy()
    if n == 0:
        return np.zeros_like(x), p_prev, np.zeros_like(x)
    for k in range(1, n):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        dp = n * (x * p - p_prev) / (x * x - 1.0)
    return p_prev, p, dp


def lgr_nodes(m: int, tol: float = 1e-14, max_iter: int = 100):
    """LGR nodes (roots of ``P_{m-1} + P_m``, ``-1`` included) and weights."""
    if m < 2:
        raise ValueError("need at least 2 LGR nodes")
    # Chebyshev-Gauss-Radau points as the starting guess
    x = -np.cos(2.0 * np.pi * np.arange(m) / (2 * m - 1))
    free = slice(1, None)
    for _ in range(max_iter):
        xf = x[free]
        pm1, pm, dpm = _legendre_pair(xf, m)
        _, _, dpm1 = _legendre_pair(xf, m - 1)
        step = (pm1 + pm) / (dpm1 + dpm)
        x[free] = xf - step
        if np.max(np.abs(step), initial=0.0) <= tol:
            break
    else:
        raise GridBuildFailure(f"LGR nodes for m={m} did not converge to {tol:g}")
    x[0] = -1.0
    x.sort()
    w = np.empty(m)
    w[0] = 2.0 / m**2
    # (1 - x) / (m P_{m-1})^2 is ill-conditioned at the node nearest +1, where
    # P_{m-1} is small; the Christoffel form is insensitive to node rounding
    w[1:] = _christoffel_jacobi01(x[1:], m - 1) / (1.0 + x[1:])
    return x, w


def _christoffel_jacobi01(x, n):
    """Christoffel function of degree ``n`` for the weight ``1 + x`` on [-1, 1].

    At the zeros of the degree-``n`` Jacobi(0, 1) polynomial these are the
    Gauss-Jacobi weights.  Uses the orthonormal three-term recurrence.
    """
    q_prev = np.zeros_like(x)
    q = np.full_like(x, np.sqrt(0.5))
    total = q * q
    beta_prev = 0.0
    for k in range(n - 1):
        alpha = 1.0 / ((2 * k + 1) * (2 * k + 3))
        beta = np.sqrt((k + 1) * (k + 2) / (2 * k + 3) ** 2)
        q_prev, q = q, ((x - alpha) * q - beta_prev * q_prev) / beta
        beta_prev = beta
        total += q * q
    return 1.0 / total


def barycentric_weights(points):
    t = np.asarray(points, dtype=float)
    diff = t[:, None] - t[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / np.prod(diff, axis=1)


def differentiation_matrix(points):
    """Lagrange differentiation matrix via barycentric weights."""
    t = np.asarray(points, dtype=float)
    diff = t[:, None] - t[None, :]
    np.fill_diagonal(diff, 1.0)
    bw = barycentric_weights(t)
    D = (bw[None, :] / bw[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


@lru_cache(maxsize=32)
def build_grid(m: int = 19) -> CollocationGrid:
    nodes, weights = lgr_nodes(m)
    support = np.append(nodes, 1.0)
    D = differentiation_matrix(support)
    integ = np.linalg.inv(D[:m, 1:])
    for a in (nodes, weights, support, D, integ):
        a.setflags(write=False)
    return CollocationGrid(m, nodes, weights, support, D, integ)


def lagrange_interpolate(support, values, tau):
    """Evaluate the polynomial through ``(support, values)`` at ``tau`` (barycentric).

    The weights are passed explicitly so the result is bit-for-bit repeatable.
    """
    from scipy.interpolate import BarycentricInterpolator
    return BarycentricInterpolator(support, values, axis=0, wi=barycentric_weights(support))(tau)


@dataclass(frozen=True)
class DecisionVector:
    """Heading at every support point and the final time."""

    headings: np.ndarray
    tf: float

    def __post_init__(self):
        object.__setattr__(self, "headings", np.asarray(self.headings, dtype=float))
        if not self.tf > 0:
            raise ValueError(f"tf must be positive, got {self.tf!r}")


@dataclass(frozen=True)
class Residuals:
    terminal: np.ndarray
    path: np.ndarray
    defects: np.ndarray


def reconstruct_states(dv: DecisionVector, spec: ScenarioSpec, grid: CollocationGrid):
    """States at all support points and the collocation defects.

    Returns
    -------
    states : ndarray, shape (m + 1, 2)
    defects : ndarray, shape (m, 2)
        ``D X - (t_f/2) F`` at the LGR nodes (round-off level by construction).
    """
    m = grid.m
    psi = dv.headings[:m]
    half = 0.5 * dv.tf * spec.v
    F = np.column_stack((np.cos(psi), np.sin(psi)))
    x0 = np.asarray(spec.x0, dtype=float)
    states = np.empty((m + 1, 2))
    states[0] = x0
    states[1:] = x0 + half * (grid.integration @ F)
    defects = grid.diff_matrix[:m] @ states - half * F
    return states, defects


def evaluate_objective(dv: DecisionVector, spec: ScenarioSpec, grid: CollocationGrid,
                       states=None) -> float:
    if states is None:
        states, _ = reconstruct_states(dv, spec, grid)
    if spec.kind in ("A", "B"):
        return float(dv.tf)
    g = penalty_g(states[: grid.m], dv.headings[: grid.m], spec.ez)
    integral = 0.5 * dv.tf * float(grid.weights @ g)
    if spec.kind == "C":
        return float(dv.tf + spec.k_ez * integral)
    return integral


def penalty_integral(dv: DecisionVector, spec: ScenarioSpec, grid: CollocationGrid, states=None) -> float:
    """LGR quadrature of the zone penalty over the trajectory."""
    if states is None:
        states, _ = reconstruct_states(dv, spec, grid)
    g = penalty_g(states[: grid.m], dv.headings[: grid.m], spec.ez)
    return 0.5 * dv.tf * float(grid.weights @ g)


def evaluate_constraints(dv: DecisionVector, spec: ScenarioSpec, grid: CollocationGrid,
                         states=None, defects=None) -> Residuals:
    """Terminal equality residuals, path residuals (B only, all support points) and defects.

    Path residuals use the sign of ``c``: positive means inside the zone.
    """
    if states is None or defects is None:
        states, defects = reconstruct_states(dv, spec, grid)
    terminal = states[-1] - np.asarray(spec.xf, dtype=float)
    if spec.kind == "B":
        path = np.asarray(constraint_c(states, dv.headings, spec.ez), dtype=float)
    else:
        path = np.empty(0)
    return Residuals(terminal, path, defects)


class Transcription:
    """Scenario plus grid, with cached state reconstruction for one decision vector."""

    def __init__(self, spec: ScenarioSpec, grid: CollocationGrid | None = None):
        self.spec = spec
        self.grid = grid if grid is not None else build_grid(spec.grid_m)
        self._key = None

    def _update(self, dv):
        key = (dv.tf, dv.headings.tobytes())
        if key != self._key:
            self.states, self.defects = reconstruct_states(dv, self.spec, self.grid)
            self._key = key

    def objective(self, dv: DecisionVector) -> float:
        self._update(dv)
        return evaluate_objective(dv, self.spec, self.grid, self.states)

    def constraints(self, dv: DecisionVector) -> Residuals:
        self._update(dv)
        return evaluate_constraints(dv, self.spec, self.grid, self.states, self.defects)

    def state_table(self, dv: DecisionVector) -> np.ndarray:
        self._update(dv)
        return self.states.copy()
