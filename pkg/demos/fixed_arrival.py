"""
Fixed arrival time
==================

Given a deadline between the straight-line time and the hard-avoidance time,
find the least exposure.  At the straight-line time there is nothing to
choose.
"""

import numpy as np

from ez_avoid import ScenarioSpec, compute_time_bounds, solve_scenario_d

t_a, t_b = compute_time_bounds(ScenarioSpec("B"))
print(f"admissible deadlines [{t_a:.4f}, {t_b:.4f})")
for t_go in (t_a, 6.25, 6.4):
    d = solve_scenario_d(ScenarioSpec("D", t_go=t_go), bounds=(t_a, t_b))
    print(f"t_go = {t_go:.4f}  exposure = {d.objective:.5f}  heading spread = "
          f"{np.ptp(np.unwrap(d.headings)):.3f}  residual = {d.terminal_residual:.1e}")
