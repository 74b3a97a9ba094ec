"""
The engagement zone
===================

The zone is a cardioid around the origin whose reach depends on which way the
vehicle is pointing.  Flying straight at the origin the vehicle is exposed out
to the full radius; flying straight away it is safe almost everywhere.
"""

import numpy as np

from ez_avoid import EngagementZone, aspect_angle, constraint_c, penalty_g, rho_max

ez = EngagementZone(r_max=2.0)

# reach of the zone as a function of aspect angle
for xi in np.linspace(0.0, np.pi, 5):
    print(f"xi = {xi:5.3f}  rho_max = {rho_max(xi, ez):.4f}")

# one position, three headings: inbound, crossing, outbound
state = (1.5, 0.0)
for name, psi in [("inbound", np.pi), ("crossing", np.pi / 2), ("outbound", 0.0)]:
    xi = aspect_angle(state, psi)
    print(f"{name:9s} xi={xi:+.3f}  c={constraint_c(state, psi, ez):+.4f}  g={penalty_g(state, psi, ez):.4f}")
