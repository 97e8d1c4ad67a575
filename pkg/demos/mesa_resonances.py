"""
Emission resonances of a flat cavity
====================================

A slow atom entering a resonant cavity with a flat profile sees two square
potentials, one per dressed state. Photon emission peaks whenever the
cavity length fits a whole number of half wavelengths of the attracted
dressed channel.
"""

import math

import numpy as np

from mazer import ManifoldParams, mesa_scatter
from mazer.scatter import channel_momenta

params = ManifoldParams(g=1.0, delta=0.0)
k = 0.1

_, k_up, k_down = channel_momenta(params, k)
print("inside the cavity: k+ =", k_up, " k- =", k_down)

lengths = np.linspace(1.0, 30.0, 300)
emission = np.array([mesa_scatter(params, x, k).p_emission for x in lengths])

peaks = [i for i in range(1, len(lengths) - 1)
         if emission[i] > emission[i - 1] and emission[i] >= emission[i + 1]]

print(f"\n{'q':>2} {'L peak':>8} {'q*pi/k-':>8} {'P_emission':>11}")
for q, i in enumerate(peaks[:5], start=1):
    print(f"{q:2d} {lengths[i]:8.3f} {q * math.pi / k_down.real:8.3f} {emission[i]:11.4f}")

# a crude text plot of the first stretch of the scan
print()
for x, p in zip(lengths[::6], emission[::6]):
    print(f"{x:6.2f} |" + "#" * int(round(50 * p)))
