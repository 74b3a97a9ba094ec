"""Minimum-time and penalty-optimal paths around a cardioid engagement zone.

The vehicle moves at constant speed with heading as its only control.  Four
problem variants are solved by Legendre-Gauss-Radau collocation and a
derivative-free linear-approximation trust-region solver, and checked
against closed-form results.
"""

from .analytic import (
    BoundaryHeadingRoots,
    CostatePair,
    boundary_heading_roots,
    closed_form_control_c,
    costate_rates_c,
    hamiltonian,
    scenario_a_heading,
    scenario_a_time,
    select_boundary_root,
    stationarity_residual_c,
    stationary_heading_c,
)
from .cobyla import NlpProblem, SolveStatus, multistart, solve
from .collocation import CollocationGrid, DecisionVector, build_grid, evaluate_constraints, evaluate_objective, reconstruct_states
from .geometry import EngagementZone, VehicleState, aspect_angle, constraint_c, distance, los_angle, penalty_g, rho_general, rho_max, wrap_angle
from .problem import ScenarioSpec
from .scenarios import (
    SolveReport,
    SolverSettings,
    compute_time_bounds,
    solve_scenario_a,
    solve_scenario_b,
    solve_scenario_c,
    solve_scenario_d,
    sweep_scenario_c,
)

__version__ = "0.1.0"
