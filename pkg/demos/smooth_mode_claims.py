"""
Do the derivative couplings vanish?
===================================

For a flat cavity the dressed basis does not depend on position, so the
dressed channels decouple. For a smooth profile with nonzero detuning it
does, and the terms proportional to theta' and theta'' stay. This script
runs every check on a sine profile and then compares the two forms of the
dressed equations against the bare-basis solver.
"""

import math

from mazer import ManifoldParams, ScatterConfig, numeric_scatter_dressed, parse
from mazer.claimcheck import run_all_claims
from mazer.scatter import bare_richardson

L = 10.0
params = ManifoldParams(g=1.0, delta=1.0)
mode = parse("sine", L)

for report in run_all_claims(params, mode, k=1.0):
    print(report.to_text())
    print()

# peak |theta'| for u = sin(pi z/L) sits at the walls: beta*pi/(L*delta)
print("closed-form max |theta'| =", params.beta * math.pi / (L * params.delta))

oracle = bare_richardson(ScatterConfig(params, mode, 1.0, slices=1024))
print(f"\n{'solver':<16} {'P_emission':>12} {'flux error':>11}")
print(f"{'bare (extrap.)':<16} {oracle['P_refl_g'] + oracle['P_trans_g']:12.9f} {'':>11}")
for variant in ("derived", "literal"):
    res = numeric_scatter_dressed(ScatterConfig(params, mode, 1.0, variant=variant))
    print(f"{'dressed-' + variant:<16} {res.p_emission:12.9f} {res.flux_error:11.2e}")
