import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gqkit import numberlab as nl
from gqkit.errors import InsufficientDepth, PrecisionExhausted, ZeroMode


def test_golden_all_ones(frozen):
    s = nl.golden_ratio(10)
    assert list(s.partial_quotients) == frozen["golden_cf10"]
    assert s.depth == 10 and not s.rational


def test_half_is_rational():
    s = nl.expand_continued_fraction(0.5, 5)
    assert s.partial_quotients == (0, 2)
    assert s.rational


def test_sqrt2_quotients_and_reconstruction(frozen):
    s = nl.expand_continued_fraction(mpmath.sqrt(2), 8, prec=200)
    assert list(s.partial_quotients) == frozen["sqrt2_cf8"]
    c = nl.convergents(s)[-1]
    assert abs(Fraction(c.p, c.q) - Fraction(frozen["sqrt2_value"])) < Fraction(1, c.q**2)


def test_decimal_string_input(frozen):
    s = nl.expand_continued_fraction(frozen["sqrt2_value"], 30)
    assert s.partial_quotients == (1,) + (2,) * 29


def test_short_decimal_exhausts_precision():
    with pytest.raises(PrecisionExhausted):
        nl.expand_continued_fraction("1.4142", 30)


def test_depth_precondition():
    with pytest.raises(ValueError):
        nl.expand_continued_fraction(0.5, 0)


def test_rational_within_precision_is_flagged():
    # 1/3 to 40 digits looks rational long before the digits run out
    s = nl.expand_continued_fraction("0." + "3" * 40, 10)
    assert s.rational and s.partial_quotients == (0, 3)


def test_low_precision_mpf_raises():
    with mpmath.workprec(20):
        x = +mpmath.pi
    with pytest.raises(PrecisionExhausted):
        nl.expand_continued_fraction(x, 30, prec=20)


@pytest.mark.parametrize("key,cf", [("golden_convergents6", [1] * 6), ("sqrt2_convergents4", [1, 2, 2, 2])])
def test_convergent_examples(frozen, key, cf):
    s = nl.from_quotients(cf)
    assert [[c.p, c.q] for c in nl.convergents(s)] == frozen[key]


def test_convergents_of_half():
    assert [(c.p, c.q) for c in nl.convergents(nl.expand_continued_fraction(0.5, 5))] == [(0, 1), (1, 2)]


def test_convergent_invariants(golden):
    conv = nl.convergents(golden)
    assert all(math.gcd(c.p, c.q) == 1 for c in conv)
    # q_0 = q_1 = 1 when a_1 = 1, strict from index 1 on
    assert all(b.q > a.q for a, b in zip(conv[1:], conv[2:]))


def test_alternation_and_error_bound(golden):
    conv = nl.convergents(golden)
    signs = []
    for c, nxt in zip(conv, conv[1:]):
        err = golden.center - Fraction(c.p, c.q)
        assert abs(err) < Fraction(1, c.q * nxt.q)
        signs.append(err > 0)
    assert all(a != b for a, b in zip(signs, signs[1:]))


def test_reconstruction_invariant(golden):
    c = nl.convergents(golden)[-1]
    assert abs(golden.center - Fraction(c.p, c.q)) <= Fraction(1, c.q**2)


def test_golden_exponent():
    est = nl.estimate_irrationality_exponent(nl.golden_ratio(20))
    assert est.classification == "diophantine"
    assert abs(est.exponent - 2) < 0.1
    assert est.depth_used == 20


def test_sqrt2_exponent_diophantine():
    est = nl.estimate_irrationality_exponent(nl.sqrt2(20))
    assert est.classification == "diophantine" and est.exponent >= 2


def test_liouville_suspect(liouville6):
    est = nl.estimate_irrationality_exponent(liouville6.eta)
    assert est.classification == "liouville-suspect"
    assert est.exponent >= 2


def test_rational_input_insufficient_depth():
    with pytest.raises(InsufficientDepth):
        nl.estimate_irrationality_exponent(nl.expand_continued_fraction(0.5, 5))


def test_shallow_input_insufficient_depth():
    with pytest.raises(InsufficientDepth):
        nl.estimate_irrationality_exponent(nl.golden_ratio(3))


def test_small_divisor_examples(frozen, golden):
    assert nl.small_divisor(1, nl.expand_continued_fraction(0.5, 5)) == 2
    assert abs(nl.small_divisor(1, golden) - frozen["golden_divisor_k1"]) < 1e-14
    with pytest.raises(ZeroMode):
        nl.small_divisor(0, golden)


def test_small_divisor_identity_and_growth(golden):
    ks = np.arange(1, 10_001)
    d = [nl.small_divisor(int(k), golden) for k in ks]
    with mpmath.workdps(40):
        worst = max(abs(di - 2 * abs(mpmath.sin(mpmath.pi * int(k) * golden.value))) for k, di in zip(ks, d))
    assert worst < 1e-12
    # record reciprocals grow at most like k**(nu+1) with nu = 2
    recip = np.array([float(1 / x) for x in d])
    rec_k, best = [], 0
    for k, r in zip(ks, recip):
        if r > best:
            best = r
            rec_k.append((k, r))
    x, y = np.log([k for k, _ in rec_k]), np.log([r for _, r in rec_k])
    slope = np.polyfit(x[2:], y[2:], 1)[0]
    assert slope <= 3
    assert 0.8 < slope < 1.2


def test_liouville_order3(frozen):
    w = nl.build_liouville_number(3)
    assert len(w.pairs) == 2 and w.verify()
    for (p, k), ref in zip(w.pairs, frozen["liouville3_pairs"]):
        assert (str(p), str(k)) == (ref["p"], ref["k"])
        assert ref["margin_log10"] > 0


def test_liouville_order6_increasing(liouville6):
    ks = [k for _, k in liouville6.pairs]
    assert all(b > a for a, b in zip(ks, ks[1:]))
    assert liouville6.order_reached == 6 and liouville6.verify()


def test_liouville_precondition():
    with pytest.raises(ValueError):
        nl.build_liouville_number(1)


def test_liouville_digit_budget():
    with pytest.raises(PrecisionExhausted):
        nl.build_liouville_number(7, max_digits=100_000)


def test_liouville_divisor_bound(liouville6):
    for s, (_, k) in zip(liouville6.orders, liouville6.pairs):
        d = nl.small_divisor(k, liouville6.eta)
        assert 1 / d > mpmath.mpf(k) ** (s - 1) / (2 * mpmath.pi)


def test_witness_from_convergents(liouville6):
    w = nl.witness_from_convergents(liouville6.eta)
    assert w.verify() and w.order_reached >= 6


def test_slope_json_roundtrip(golden):
    data = golden.to_json()
    back = nl.SlopeNumber.from_json({"value_decimal": data["value_decimal"], "depth": 30})
    assert back.partial_quotients == golden.partial_quotients[:30]
    assert nl.SlopeNumber.from_json({"cf": [0, 2]}).rational


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(1, 50), min_size=1, max_size=15), st.integers(-5, 5))
def test_rational_quotients_roundtrip(tail, a0):
    cf = [a0] + tail
    if cf[-1] == 1 and len(cf) > 1:
        cf[-1] = 2  # canonical form
    r = nl.from_quotients(cf)
    again = nl.expand_continued_fraction(r.lower, 100)
    assert list(again.partial_quotients) == cf and again.rational


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 10_000))
def test_sqrt_expansions_bounded_error(n):
    if int(math.isqrt(n)) ** 2 == n:
        return
    with mpmath.workprec(400):
        x = mpmath.sqrt(n)
    s = nl.expand_continued_fraction(x, 25, prec=400)
    conv = nl.convergents(s)
    for c, nxt in zip(conv, conv[1:]):
        assert abs(s.center - Fraction(c.p, c.q)) < Fraction(1, c.q * nxt.q)
