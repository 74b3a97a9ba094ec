"""
Soft avoidance
==============

Pricing the zone instead of forbidding it.  A small gain cuts the corner, a
large one recovers the hard-constrained path.  Each gain is warm-started from
the previous one and from the hard-constrained optimum.
"""

from ez_avoid import ScenarioSpec, solve_scenario_b, sweep_scenario_c
from ez_avoid.scenarios import sweep_is_monotone

b = solve_scenario_b(ScenarioSpec("B"))
sweep = sweep_scenario_c(ScenarioSpec("C"), [0.0, 0.1, 1.0, 10.0, 100.0, 1000.0], baseline_b=b)
for rep in sweep:
    print(f"k = {rep.spec.k_ez:7g}  tf = {rep.tf:.6f}  exposure = {rep.penalty_integral:.3e}")
print("hard-constrained tf", round(b.tf, 6))
print(sweep_is_monotone(sweep))
