"""
Minimum-time paths
==================

Ignoring the zone the answer is the chord.  Keeping every node outside the
zone bends the path around it: free flight, a stretch riding the boundary,
free flight again.
"""

import numpy as np

from ez_avoid import ScenarioSpec, solve_scenario_a, solve_scenario_b
from ez_avoid.scenarios import arc_sequence

a = solve_scenario_a(ScenarioSpec("A"))
print(f"straight line: tf = {a.tf:.8f}, analytic {np.sqrt(38.25):.8f}")

b = solve_scenario_b(ScenarioSpec("B"))
print(f"avoiding the zone: tf = {b.tf:.8f}  ({b.status.code}, {b.status.evals} evaluations)")
print("arc sequence", arc_sequence(b.node_c), "| active nodes", b.oracle_checks["active_nodes"])
print("largest node violation", b.max_node_violation, "| between nodes", b.max_dense_violation)
print("heading error against the boundary root", b.oracle_checks["boundary_root_max_error"])
