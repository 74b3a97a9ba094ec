"""
Closed-form checks
==================

Three results do not need an optimiser: the straight-line time, the two
headings that keep a point exactly on the zone boundary, and the heading that
makes the penalised Hamiltonian stationary.  The numerical solutions are
checked against all three.
"""

import warnings

import numpy as np

from ez_avoid import (
    EngagementZone,
    boundary_heading_roots,
    closed_form_control_c,
    rho_max,
    aspect_angle,
    scenario_a_heading,
    scenario_a_time,
    stationarity_residual_c,
)

ez = EngagementZone(2.0)
x0, xf = (1.0, 3.0), (-0.5, -3.0)
print("straight-line time", scenario_a_time(x0, xf, 1.0), "= sqrt(38.25) =", np.sqrt(38.25))
print("straight-line heading", scenario_a_heading(x0, xf))

state = (0.9, -1.1)
roots = boundary_heading_roots(state, ez)
d = np.hypot(*state)
for psi in (roots.psi_plus, roots.psi_minus):
    print(f"boundary heading {psi:+.6f}: rho_max - d = {rho_max(aspect_angle(state, psi), ez) - d:+.1e}")

# the arccos expression for the penalised heading is cross-checked, never trusted
with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    chk = closed_form_control_c(state, (0.4, -0.7), 1.0, ez)
print("root-search heading", chk.heading,
      "stationarity residual", stationarity_residual_c(state, chk.heading, (0.4, -0.7), 1.0, ez))
print("closed form flagged:", chk.discrepancy, "| its residual", chk.residual_c2)
