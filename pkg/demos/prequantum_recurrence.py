"""The prequantum gluing system: a recurrence with unit-modulus steps.

    python3 demos/prequantum_recurrence.py
"""

import cmath

from gqkit import cohomeq as ce
from gqkit import numberlab as nl

# %% With w_hat = 0 and w = delta_0 the coefficients along each residue class
# mod p keep a constant modulus: they never decay, so no seed choice gives a
# smooth section and H^1 is infinite dimensional for every slope.
K = 64
eta = nl.golden_ratio(40)
for p in (1, 2, 3):
    seeds = [cmath.exp(0.7j * r) for r in range(p)]
    res = ce.solve_prequantum(eta, p, ce.FourierVector.zeros(K), ce.FourierVector.delta(0, K), seeds)
    mods = [abs(res.v[k]) for k in range(0, K + 1, p)]
    print(f"p={p}: residual={res.residual:.1e}, |v_k| along 0 mod p in [{float(min(mods)):.15f}, {float(max(mods)):.15f}]")

# %% The classification does not care about the slope.
for name, s in (("golden", eta), ("sqrt2", nl.sqrt2(40)), ("liouville", nl.build_liouville_number(5).eta)):
    line = ", ".join(f"p={p}: ({c[0]}, {c[1].kind})" for p in (1, 2, 3)
                     for c in [ce.classify_h1(s, {"prequantum": p})])
    print(f"{name:>9}: {line}")
