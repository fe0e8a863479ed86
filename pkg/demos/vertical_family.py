"""Continue the family of vertical closed orbits born at the centre.

At the centre of the equal-mass configuration the planar Hessian is negative
definite, so no small planar closed orbits exist there.  The vertical
direction is stable, however, and a family of out-of-plane orbits starts at
the period 2 pi / sqrt(beta3).  We follow it with shooting and
pseudo-arclength continuation, then compare the small-amplitude period with
the linear prediction.

Run with ``python demos/vertical_family.py`` (about ten seconds).
"""

import math

import numpy as np

from coriolis_orbits import MassTriple
from coriolis_orbits.dynamics import HamiltonianSystem, branch_status, continue_branch
from coriolis_orbits.rt4bp import find_librations

m = MassTriple.equal()
points = find_librations(m)
centre = next(lp for lp in points if np.linalg.norm(lp.position) < 1e-12)
b3 = centre.betas.beta3
T0 = 2 * math.pi / math.sqrt(b3)
print(f"beta3 at the centre = {b3:.12f}; linear period {T0:.10f}")
print(f"vertical bifurcation number {centre.vertical_gamma:+d}")

system = HamiltonianSystem.rt4bp(m, 3, equilibria=[lp.position for lp in points])
branch = continue_branch(system, np.zeros(3), T0, max_steps=25, gamma=centre.vertical_gamma)

print(f"\n{'step':>4} {'period':>14} {'amplitude':>11} {'max|z|':>9} {'closure':>9}")
for k, orbit in enumerate(branch.orbits):
    print(f"{k:4d} {orbit.T:14.10f} {orbit.amplitude(np.zeros(3)):11.6f} "
          f"{orbit.max_abs_z():9.6f} {orbit.closure:9.1e}")

print(f"\nperiod extrapolated to zero amplitude: {branch.extrapolated_period():.10f}")
st = branch_status(branch, system)
print(f"continuation stopped with status {branch.status!r}; evidence {st.evidence}")
