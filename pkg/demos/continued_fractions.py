"""Continued fractions, small divisors and how badly a slope resists
rational approximation.

    python3 demos/continued_fractions.py
"""

import mpmath

from gqkit import numberlab as nl

# %% Certified expansions. Every quotient printed here holds for every real
# number inside the input enclosure, not just for its floating-point center.
with mpmath.workprec(700):
    constants = {"e": +mpmath.e, "pi": +mpmath.pi}
slopes = {
    "golden": nl.golden_ratio(40),
    "sqrt2": nl.sqrt2(40),
    **{name: nl.expand_continued_fraction(x, 60, prec=680) for name, x in constants.items()},
    "liouville(6)": nl.build_liouville_number(6).eta,
}
for name, s in slopes.items():
    head = ", ".join(str(a) for a in s.partial_quotients[:12])
    print(f"{name:>13}: [{head}, ...]  ({s.depth} certified quotients)")

# %% Irrationality exponents. Bounded-type and algebraic slopes sit at 2;
# the Liouville number shows ever larger jumps in its local exponents.
print()
for name, s in slopes.items():
    est = nl.estimate_irrationality_exponent(s)
    print(f"{name:>13}: exponent ~ {est.exponent:7.3f}  -> {est.classification}")

# %% Small divisors |exp(2 pi i k eta) - 1| along the denominators of the
# convergents. For the golden ratio they shrink like 1/k, for the Liouville
# number catastrophically faster.
print()
for name in ("golden", "liouville(6)"):
    s = slopes[name]
    qs = sorted({c.q for c in nl.convergents(s) if c.q > 1})[:8]
    cells = "  ".join(f"q={q if q < 10**6 else f'1e{len(str(q)) - 1}'}:{mpmath.nstr(nl.small_divisor(q, s), 3)}"
                      for q in qs)
    print(f"{name:>13}: {cells}")

# %% The Liouville pairs come with an exact certificate.
wit = nl.build_liouville_number(6)
print()
print("Liouville certificate |eta - p/k| < k^-s holds for s =", list(wit.orders), ":", wit.verify())
