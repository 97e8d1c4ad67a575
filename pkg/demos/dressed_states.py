"""
Dressed states along a cavity
=============================

Walk through a sine-shaped cavity and watch the atom-field eigenstates
rotate. Off resonance the upper dressed state is the bare excited state at
the walls and moves toward an even mixture as the field grows. The rate of
that rotation is what couples the two dressed channels.
"""

import numpy as np

from mazer import ManifoldParams, eval012, parse
from mazer.dressed import dressed_point

L = 10.0
params = ManifoldParams(g=1.0, delta=1.0)
mode = parse("sine", L)

# stay just inside the walls, where u is small but nonzero
z = np.linspace(0.02 * L, 0.98 * L, 13)
u, du, d2u = eval012(mode, z)
pt = dressed_point(params, u, du, d2u)

print(f"{'z':>6} {'u':>8} {'lambda':>8} {'theta/pi':>9} {'theta1':>9} {'theta2':>9}")
for row in zip(z, u, pt.lam, pt.theta / np.pi, pt.dtheta, pt.d2theta):
    print("{:6.2f} {:8.4f} {:8.4f} {:9.4f} {:9.4f} {:9.4f}".format(*row))

# the splitting never closes for delta != 0, so theta is smooth
print("\nsmallest splitting:", pt.lam.min(), "(half the detuning is", params.delta / 2, ")")

# on resonance the angle is pinned at pi/4 and the coupling vanishes
res = dressed_point(params.replace(delta=0.0), u, du, d2u)
print("on resonance, theta/pi =", np.unique(res.theta / np.pi), " max |theta'| =", np.abs(res.dtheta).max())
