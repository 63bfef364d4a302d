"""Bohr-Sommerfeld leaves of a vertical polarization and the Sniatycki count.

    python3 demos/bohr_sommerfeld.py
"""

import math

import numpy as np

from gqkit import prequantum as pq
from gqkit import quantize as qz

# %% A chart of the cylinder with potential h(x, theta). The holonomy of the
# vertical circle through x is exp(2 pi i * action(x)); it is trivial exactly
# when the action is an integer.
def wavy(x, t):
    return 1.3 * x + 0.25 * math.sin(2 * math.pi * t) + 0.1 * x * math.cos(4 * math.pi * t)


chart = pq.ConnectionChart.from_function(wavy, (-1.5, 1.5))
print("x       action    |BS determinant|")
for x in np.linspace(-1.5, 1.5, 7):
    print(f"{x:+.2f}   {chart.action(x):+.5f}   {abs(pq.bs_determinant(chart, x)):.4f}")

# %% Scanning for the integer levels.
print()
for x, rep in pq.bs_scan(chart):
    print(f"BS leaf at x = {x:+.10f}: action = {rep.action:+.12f}, holonomy - 1 = {abs(rep.holonomy - 1):.1e}")

# %% The quantization of the strip is concentrated in degree 1 and counts
# these leaves; gluing one strip per leaf reproduces the same answer with an
# exactness audit at each step.
strip = qz.strip_quantize(chart)
glued = qz.sniatycki_by_gluing(strip[1].value)
print()
print("strip quantization:", strip)
print("by gluing:         ", glued, "| audited sequences:", [s.terms for s in glued.trace])

# %% Higher-dimensional fibrations: the count is a lattice-point count in the
# image of the action map, and Kunneth multiplies the pieces.
box = qz.ActionBox((qz.Interval(-0.5, 2.5), qz.Interval(0.0, 3.0, lo_open=True, hi_open=True)))
print()
print("BS fibres in the box:", qz.count_bs_fibers(box), "->", qz.sniatycki_quantize(box.n, qz.count_bs_fibers(box)))
a, b = qz.sniatycki_quantize(1, 3), qz.sniatycki_quantize(1, 2)
print("product of (0, C^3) and (0, C^2):", qz.kunneth_combine(a, b))
