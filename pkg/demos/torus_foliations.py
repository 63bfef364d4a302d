"""Generic foliations of the torus: closed leaves, flat limits and
tangencies of a transverse loop.

    python3 demos/torus_foliations.py
"""

import cmath
import math

import numpy as np

from gqkit import foliation as fo

# %% Near a nondegenerate closed leaf the return map contracts by exp(-lam).
# A flat section followed along the spiralling leaves converges on the closed
# leaf only when the leaf itself is Bohr-Sommerfeld.
for lam in (0.25, 1.0, 4.0):
    row = []
    for j in range(8):
        leaf = fo.LeafData.from_phase(lam, cmath.exp(2j * math.pi * j / 8) if j else 1.0)
        row.append("Y" if fo.flat_limit_exists(leaf) else ".")
    bs = fo.flat_limit_trace(fo.LeafData.bs(lam))
    print(f"lam={lam:<5} phases 0..7/8: {' '.join(row)}   BS gap rate {bs.fitted_rate:.3f}")

# %% Three closed leaves, the middle one not Bohr-Sommerfeld.
leaves = tuple(fo.LeafData.from_phase(1.0, b, i + 1) for i, b in enumerate((1, -1, 1)))
summary, trace = fo.torus_cohomology(fo.FoliationModel("generic", {"prequantum": 1}, leaves=leaves))
print()
for step in trace:
    print(f"step {step['step']}: {step['glued']:<18} h0={step['h0']} finite={step['finite_part']} "
          f"flags={step['quotient_flags']} exact={step['exact']}")
print("H0 =", summary[0], "| H1 =", summary[1])

# %% A loop theta = f(x) against the horizontal line field: every critical
# point of f is a tangency, signed by the direction in which the field turns.
n = 720
t = np.arange(n) / n
f = 0.15 * np.sin(2 * math.pi * t) + 0.05 * np.sin(6 * math.pi * t)
rep = fo.tangency_count(t, f, lambda x, y: (1.0, 0.0))
print()
print(f"mu+ = {rep.mu_plus}, mu- = {rep.mu_minus}, at", [f"{x:.3f}{'+' if s > 0 else '-'}" for x, s in
                                                        zip(rep.locations, rep.signs)])
