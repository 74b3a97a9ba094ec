"""
Radau collocation grid
======================

Nineteen Legendre-Gauss-Radau nodes plus the right endpoint.  The quadrature
is exact for polynomials of degree 36 and the differentiation matrix is exact
for degree 19 on the 20 support points.
"""

import numpy as np

from ez_avoid import build_grid

g = build_grid(19)
print("nodes", np.round(g.nodes, 4))
print("sum of weights - 2 =", g.weights.sum() - 2.0)

p = np.polynomial.Polynomial(np.arange(1.0, 38.0) / 37.0)
exact = p.integ()(1.0) - p.integ()(-1.0)
print("degree-36 quadrature error", g.weights @ p(g.nodes) - exact)

q = np.polynomial.Polynomial(np.cos(np.arange(20.0)))
print("degree-19 derivative error", np.max(np.abs(g.diff_matrix @ q(g.support) - q.deriv()(g.support))))

# the integration matrix reconstructs states from rates; its last row is the quadrature
print("last row equals weights:", np.allclose(g.integration[-1], g.weights, atol=1e-14))
