"""Smooth data, non-smooth solutions: the foliated gluing system on the
irrational-slope torus.

    python3 demos/liouville_obstruction.py
"""

import mpmath
import numpy as np

from gqkit import cohomeq as ce
from gqkit import numberlab as nl

# %% Golden ratio. Random data decaying like exp(-|k|/20) with matching zero
# modes: the mode-by-mode solution decays as well.
K = 1024
golden = nl.golden_ratio(40)
rng = np.random.default_rng(0)
envelope = np.exp(-np.abs(np.arange(-K, K + 1)) / 20)
z = (rng.normal(size=(2, 2 * K + 1)) + 1j * rng.normal(size=(2, 2 * K + 1))) * envelope
w_hat = ce.FourierVector({k: mpmath.mpc(z[0, k + K]) for k in range(-K, K + 1)}, K)
w = ce.FourierVector({k: mpmath.mpc(z[1, k + K]) for k in range(-K, K + 1)}, K)
w.coefficients[0] = w_hat[0]
res = ce.solve_foliated(golden, w_hat, w)
print(f"golden: status={res.status}, residual={res.residual:.1e}, "
      f"u is {ce.classify_decay(res.u).smooth_verdict}, v is {ce.classify_decay(res.v).smooth_verdict}")

# %% With different zero modes nothing can be done.
w.coefficients[0] = w_hat[0] + 1
print("mismatched zero modes:", ce.solve_foliated(golden, w_hat, w).status)

# %% A Liouville slope. The data w_{k_s} = 1/k_s^(s-1) decays faster than any
# power, but dividing by |2 sin(pi k_s eta)| < 2 pi / k_s^(s-1) leaves
# coefficients of size at least 1/(2 pi).
wit = nl.build_liouville_number(6)
data, run, report = ce.liouville_witness_run(wit)
print()
for (k, m), s in zip(run.extras["witness_moduli"], wit.orders):
    print(f"s={s}: k_s=10^{len(str(k)) - 1:<4d} |w|={mpmath.nstr(abs(data[k]), 3):>10}  |v|={mpmath.nstr(m, 6)}")
print("data:", ce.classify_decay(data).smooth_verdict, "| solution:", report.smooth_verdict, "| status:", run.status)

# %% Bumping one coefficient changes the solution at exactly one mode, so
# the differences span an infinite-dimensional space of non-smooth classes.
_, dirs = ce.cokernel_witnesses(wit)
print("perturbation supports:", [f"10^{len(str(k)) - 1}" for _, k, d in dirs if list(d) == [k]])

# %% The resulting first cohomology.
for name, eta in (("golden", golden), ("liouville", wit.eta)):
    s = ce.classify_h1(eta)
    print(f"{name:>9}: H0 = {s[0]}, H1 = {s[1]}")
