"""
Derivative-free solver
======================

Linear models of objective and constraints inside a shrinking trust region.
Here it minimises a linear objective over the unit disc.
"""

import numpy as np

from ez_avoid import NlpProblem, multistart, solve

prob = NlpProblem(
    objective=lambda x: x[0] + x[1],
    initial_point=[0.5, 0.5],
    inequality_constraints=lambda x: np.array([1.0 - x[0] ** 2 - x[1] ** 2]),
    rho_begin=0.5,
    rho_end=1e-8,
)
x, st = solve(prob)
print("x =", x, "expected", -np.ones(2) / np.sqrt(2))
print(st.code, "after", st.evals, "evaluations, violation", st.max_constraint_violation)

# restarts from jittered copies are reproducible for a fixed seed
x1, _ = multistart(prob, k=3, jitter=0.2, seed=4)
x2, _ = multistart(prob, k=3, jitter=0.2, seed=4)
print("repeatable:", np.array_equal(x1, x2))
