"""Regenerate frozen.json from sources independent of gqkit.

Run from the repository root:  python3 tests/oracle/make_oracles.py

sympy supplies exact continued fractions and closed forms, mpmath evaluates
the defining series directly, scipy supplies quadrature and ODE integration.
Nothing here imports gqkit.
"""

import itertools
import json
import math
import pathlib

import mpmath
import numpy as np
import sympy
from scipy.integrate import quad, solve_ivp

out = {}
mpmath.mp.dps = 60

# continued fractions and convergents
phi = (1 + sympy.sqrt(5)) / 2
out["sqrt2_cf8"] = [int(a) for a in itertools.islice(sympy.continued_fraction_iterator(sympy.sqrt(2)), 8)]
out["golden_cf10"] = [int(a) for a in itertools.islice(sympy.continued_fraction_iterator(phi), 10)]


def conv(cf):
    res = []
    for n in range(1, len(cf) + 1):
        r = sympy.Rational(0)
        for a in reversed(cf[:n]):
            r = a + (1 / r if r != 0 else 0)
        r = sympy.nsimplify(r)
        res.append([int(r.p), int(r.q)])
    return res


out["golden_convergents6"] = conv([1] * 6)
out["sqrt2_convergents4"] = conv([1, 2, 2, 2])
out["sqrt2_value"] = str(mpmath.sqrt(2))

# small divisor at k=1 for the golden ratio, by direct complex evaluation
g = (1 + mpmath.sqrt(5)) / 2
out["golden_divisor_k1"] = float(abs(mpmath.exp(2j * mpmath.pi * g) - 1))

# closed form u_1 = v_1 = 1/(2 i sin(pi phi))
u1 = 1 / (2j * mpmath.sin(mpmath.pi * g))
out["golden_unit_mass_u1"] = [float(u1.real), float(u1.imag)]

# Liouville number of order 3, summed directly at high precision
with mpmath.workdps(200):
    eta = mpmath.nsum(lambda s: mpmath.mpf(10) ** (-mpmath.factorial(s)), [1, 6])
    checks = []
    for s in (2, 3):
        k = 10 ** math.factorial(s)
        p = sum(10 ** (math.factorial(s) - math.factorial(j)) for j in range(1, s + 1))
        checks.append({"s": s, "p": str(p), "k": str(k),
                       "margin_log10": float(mpmath.log10(mpmath.mpf(k) ** -s) - mpmath.log10(abs(eta - mpmath.mpf(p) / k)))})
    out["liouville3_pairs"] = checks

# prequantum quadrature oracles
grid_h = lambda x, t: x + 0.1 * math.sin(2 * math.pi * t)
val, _ = quad(lambda t: grid_h(0.25, t), 0, 1, epsabs=1e-14)
out["grid_loop_phase_x025"] = [math.cos(2 * math.pi * val), math.sin(2 * math.pi * val)]
val, _ = quad(lambda t: 2 * 0.5, 0, 1)
out["linear_p2_action_x05"] = val
e0 = np.exp(2j * np.pi * quad(lambda s: 0.5, 0.5, 0)[0])
e1 = np.exp(2j * np.pi * quad(lambda s: 0.5, 0.5, 1)[0])
out["det_linear_x05"] = [float((e0 - e1).real), float((e0 - e1).imag)]
out["bs_2x_roots"] = [float(sympy.Rational(n, 2)) for n in range(-1, 2)]

# lattice counting by brute force enumeration
def brute(intervals):
    total = 1
    for lo, hi, lo_open, hi_open in intervals:
        cnt = 0
        for n in range(math.floor(lo) - 2, math.ceil(hi) + 3):
            ok_lo = n > lo if lo_open else n >= lo
            ok_hi = n < hi if hi_open else n <= hi
            cnt += ok_lo and ok_hi
        total *= cnt
    return total

out["count_1d_open"] = brute([(-0.5, 2.5, True, True)])
out["count_2d_open"] = brute([(-0.5, 1.5, True, True), (-0.5, 0.5, True, True)])
out["count_closed_point"] = brute([(1, 1, False, False)])

# Kunneth of (0, C^3) and (0, C^2)
out["kunneth_03_02"] = [int(c) for c in np.convolve([0, 3], [0, 2])]

# return map by ODE integration of dr/dtheta = -lam*r over one period
sol = solve_ivp(lambda t, r: -math.log(2) * r, (0, 1), [1.0], rtol=1e-12, atol=1e-14)
out["return_map_ln2"] = float(sol.y[0, -1])

# tangencies of (t, 0.1 sin 2 pi t) with the horizontal field: zeros of f'
t = sympy.symbols("t")
zeros = sympy.solveset(sympy.diff(sympy.Rational(1, 10) * sympy.sin(2 * sympy.pi * t), t), t, sympy.Interval.Ropen(0, 1))
out["sine_tangencies"] = sorted(float(z) for z in zeros)

path = pathlib.Path(__file__).with_name("frozen.json")
path.write_text(json.dumps(out, indent=1, sort_keys=True) + "\n")
print(f"wrote {path}")
