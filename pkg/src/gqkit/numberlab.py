"""Continued fractions, irrationality diagnostics, small divisors and
Liouville numbers.

A :class:`SlopeNumber` is carried as an exact rational enclosure
``[lower, upper]`` of the real slope together with the partial quotients that
the enclosure certifies. Continued-fraction steps run on exact integers, so a
quotient is only emitted when every number in the enclosure shares it.

The irrationality classification is a finite-depth heuristic: no finite
computation decides whether a number is Liouville. An estimate always carries
the depth it used, and its verdict means "at this depth the convergent
errors look like this".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction

import mpmath
import numpy as np

from .errors import InsufficientDepth, PrecisionExhausted, ZeroMode
from .serialize import unlimited_int_digits

DEFAULT_PREC = 512
STABILIZATION_TOL = 0.25
# precision (bits) for transcendental evaluations on exactly reduced arguments
PHASE_PREC = 113


@dataclass(frozen=True)
class Convergent:
    p: int
    q: int
    index: int

    def as_fraction(self) -> Fraction:
        return Fraction(self.p, self.q)


@dataclass(frozen=True)
class SlopeNumber:
    """A real slope with certified continued-fraction access.

    ``lower`` and ``upper`` enclose the true value; ``value`` is the midpoint
    rounded to ``prec`` bits. ``rational`` is set when the expansion
    terminated, either exactly or because the enclosure is consistent with a
    rational of small height.
    """

    value: mpmath.mpf
    partial_quotients: tuple[int, ...]
    lower: Fraction
    upper: Fraction
    prec: int = DEFAULT_PREC
    rational: bool = False

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("empty enclosure")
        if any(a < 1 for a in self.partial_quotients[1:]):
            raise ValueError("partial quotients beyond index 0 must be >= 1")

    @property
    def depth(self) -> int:
        return len(self.partial_quotients)

    @property
    def center(self) -> Fraction:
        return (self.lower + self.upper) / 2

    @property
    def radius(self) -> Fraction:
        return (self.upper - self.lower) / 2

    def __float__(self):
        return float(self.value)

    def to_json(self) -> dict:
        digits = max(17, int(self.prec * math.log10(2)) + 1)
        with unlimited_int_digits():
            text = mpmath.nstr(self.value, digits, min_fixed=-math.inf, max_fixed=math.inf)
        return {"cf": list(self.partial_quotients), "value_decimal": text}

    @classmethod
    def from_json(cls, data: dict, prec: int = DEFAULT_PREC) -> "SlopeNumber":
        return slope_from_json(data, prec)


@dataclass(frozen=True)
class LiouvilleWitness:
    """Certified pairs with ``|eta - p_s/k_s| < k_s**-s`` for each stored ``s``."""

    eta: SlopeNumber
    pairs: tuple[tuple[int, int], ...]
    orders: tuple[int, ...]
    order_reached: int

    def __post_init__(self):
        ks = [k for _, k in self.pairs]
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ValueError("k_s must be strictly increasing")
        if len(self.orders) != len(self.pairs):
            raise ValueError("one order per pair")

    def verify(self) -> bool:
        """Exact check of the defining inequality over the whole enclosure."""
        for s, (p, k) in zip(self.orders, self.pairs):
            target = Fraction(p, k)
            bound = Fraction(1, k**s)
            if not (abs(self.eta.lower - target) < bound and abs(self.eta.upper - target) < bound):
                return False
        return True

    def to_json(self) -> dict:
        return {
            "eta": self.eta.to_json(),
            "pairs": [{"s": s, "p": p, "k": k} for s, (p, k) in zip(self.orders, self.pairs)],
            "order_reached": self.order_reached,
        }


@dataclass(frozen=True)
class IrrationalityEstimate:
    exponent: float
    depth_used: int
    classification: str  # "diophantine" | "liouville-suspect" | "undecided"
    windowed_fits: tuple[float, ...] = ()
    record_exponents: tuple[float, ...] = ()

    def to_json(self) -> dict:
        return {
            "exponent": self.exponent,
            "depth_used": self.depth_used,
            "classification": self.classification,
            "windowed_fits": list(self.windowed_fits),
            "record_exponents": list(self.record_exponents),
        }


# ---------------------------------------------------------------------------
# enclosures and certified expansion

def _mpf_to_fraction(x: mpmath.mpf) -> Fraction:
    man, exp = x.man_exp
    man = int(man)
    return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2**-exp)


def to_mpf(x: Fraction, prec: int) -> mpmath.mpf:
    with mpmath.workprec(prec):
        return mpmath.mpf(x.numerator) / x.denominator


def enclosure(x, prec: int = DEFAULT_PREC) -> tuple[Fraction, Fraction]:
    """Rational bounds for ``x``.

    ints, Fractions and floats are exact. A decimal string stands for every
    number that rounds to it (half a unit in the last place). An mpf is
    taken to be accurate to one ulp at ``prec`` bits. A pair ``(lo, hi)`` is
    used as given.
    """
    if isinstance(x, SlopeNumber):
        return x.lower, x.upper
    if isinstance(x, tuple) and len(x) == 2:
        lo, hi = (enclosure(v, prec)[0] for v in x)
        return lo, hi
    if isinstance(x, (int, Fraction)):
        f = Fraction(x)
        return f, f
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError("non-finite input")
        f = Fraction(x)
        return f, f
    if isinstance(x, str):
        with unlimited_int_digits():
            d = Decimal(x.strip())
            f = Fraction(d)
        exp = d.as_tuple().exponent
        r = Fraction(1, 2) * (Fraction(10) ** exp)
        return f - r, f + r
    if hasattr(x, "_mpf_") and not isinstance(x, mpmath.mpf):
        # mpmath constants such as mp.pi evaluate lazily
        with mpmath.workprec(prec):
            x = +x
    if isinstance(x, mpmath.mpf):
        f = _mpf_to_fraction(x)
        if f == 0:
            return f, f
        r = abs(f) / 2 ** (prec - 1)
        return f - r, f + r
    raise TypeError(f"unsupported input type {type(x).__name__}")


def _rational_from_quotients(quotients) -> Fraction:
    p0, p1 = 1, quotients[0]
    q0, q1 = 0, 1
    for a in quotients[1:]:
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
    return Fraction(p1, q1)


def _certified_quotients(lo: Fraction, hi: Fraction, max_depth: int):
    """Expand every number of ``[lo, hi]`` simultaneously.

    Returns ``(quotients, status)`` with status ``"complete"`` (max_depth
    reached), ``"rational"`` (termination) or ``"exhausted"`` (the enclosure
    no longer determines the next quotient).
    """
    a, b = lo.numerator, lo.denominator
    c, d = hi.numerator, hi.denominator
    width = hi - lo
    quotients: list[int] = []
    while len(quotients) < max_depth:
        q_lo, r_lo = divmod(a, b)
        q_hi, r_hi = divmod(c, d)
        if q_lo != q_hi:
            # the enclosure straddles the integer q_hi
            candidate = quotients + [q_hi]
            status = _straddle_status(candidate, lo, hi, width)
            return (candidate if status == "rational" else quotients), status
        quotients.append(q_lo)
        if r_lo == 0 and r_hi == 0:
            return quotients, "rational"
        if r_lo == 0:
            # lower end terminates here, upper end continues
            return quotients, _straddle_status(quotients, lo, hi, width)
        # x -> 1/(x - a) reverses the order of the endpoints
        a, b, c, d = d, r_hi, b, r_lo
    return quotients, "complete"


def _straddle_status(candidate, lo, hi, width) -> str:
    """A straddle means "rational" only while the candidate is far below the
    resolution of the enclosure (denominator**4 <= 1/width)."""
    r = _rational_from_quotients(candidate)
    if lo <= r <= hi and r.denominator**4 * width <= 1:
        return "rational"
    return "exhausted"


def expand_continued_fraction(x, depth: int, prec: int = DEFAULT_PREC) -> SlopeNumber:
    """Certified continued-fraction expansion of ``x`` to ``depth`` quotients.

    Stops early with ``rational=True`` when ``x`` is (within precision) a
    rational number; raises :class:`PrecisionExhausted` when the input
    accuracy cannot certify ``depth`` quotients.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    lo, hi = enclosure(x, prec)
    quotients, status = _certified_quotients(lo, hi, depth)
    if status == "exhausted":
        raise PrecisionExhausted(
            f"input accuracy certifies only {len(quotients)} of {depth} quotients",
            where="numberlab.expand_continued_fraction",
        )
    rational = status == "rational"
    if rational:
        # snap the enclosure onto the detected rational
        r = _rational_from_quotients(quotients) if len(quotients) else lo
        if lo != hi:
            quotients = _canonical_quotients(r)
        lo = hi = r
    return SlopeNumber(to_mpf((lo + hi) / 2, prec), tuple(quotients), lo, hi, prec, rational)


def _canonical_quotients(r: Fraction) -> list[int]:
    quotients, _ = _certified_quotients(r, r, 10**9)
    return quotients


def from_quotients(quotients, prec: int = DEFAULT_PREC) -> SlopeNumber:
    """The rational number with the given finite continued fraction."""
    quotients = [int(a) for a in quotients]
    r = _rational_from_quotients(quotients)
    return SlopeNumber(to_mpf(r, prec), tuple(quotients), r, r, prec, True)


def slope_from_json(data: dict, prec: int = DEFAULT_PREC, depth: int = 40) -> SlopeNumber:
    """``{"cf": [...]}``, ``{"value_decimal": "...", "depth": n}`` or
    ``{"preset": "golden" | "sqrt2" | "liouville", ...}``."""
    prec = int(data.get("prec", prec))
    depth = int(data.get("depth", depth))
    if "preset" in data:
        name = data["preset"]
        if name == "golden":
            return golden_ratio(depth, prec)
        if name == "sqrt2":
            return sqrt2(depth, prec)
        if name == "liouville":
            return build_liouville_number(int(data.get("order", 6))).eta
        raise ValueError(f"unknown slope preset {name!r}")
    if "cf" in data:
        return from_quotients(data["cf"], prec)
    return expand_continued_fraction(str(data["value_decimal"]), depth, prec)


def golden_ratio(depth: int = 40, prec: int = DEFAULT_PREC) -> SlopeNumber:
    with mpmath.workprec(prec + 16):
        phi = (1 + mpmath.sqrt(5)) / 2
    return expand_continued_fraction(phi, depth, prec)


def sqrt2(depth: int = 40, prec: int = DEFAULT_PREC) -> SlopeNumber:
    with mpmath.workprec(prec + 16):
        x = mpmath.sqrt(2)
    return expand_continued_fraction(x, depth, prec)


def convergents(s: SlopeNumber) -> list[Convergent]:
    if s.depth < 1:
        raise ValueError("empty expansion")
    out = []
    p0, p1 = 1, s.partial_quotients[0]
    q0, q1 = 0, 1
    out.append(Convergent(p1, q1, 0))
    for n, a in enumerate(s.partial_quotients[1:], start=1):
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
        out.append(Convergent(p1, q1, n))
    return out


# ---------------------------------------------------------------------------
# irrationality exponent

def _ln(n) -> float:
    if isinstance(n, Fraction):
        return float(mpmath.log(n.numerator) - mpmath.log(n.denominator))
    return float(mpmath.log(n))


def _ols_slope(x, y) -> float:
    return float(np.polyfit(np.asarray(x), np.asarray(y), 1)[0])


def estimate_irrationality_exponent(s: SlopeNumber, tol: float = STABILIZATION_TOL) -> IrrationalityEstimate:
    """Depth-bounded estimate of the irrationality exponent of ``s``.

    Two statistics are computed from the convergents ``p_n/q_n`` (the last
    one is dropped: its error is not resolved by the expansion):

    * windowed fits, the least-squares slope of ``-log|s - p_n/q_n|`` against
      ``log q_n`` over the trailing half of the points, for the windows ending
      at the last three points;
    * records of the local exponent ``-log|s - p_n/q_n| / log q_n``.

    ``liouville-suspect``: the record is broken by more than ``tol`` at least
    three times and still in the last two thirds of the window.
    ``diophantine``: otherwise, if the three fits agree within ``tol``.
    ``undecided``: neither.
    """
    if s.rational:
        raise InsufficientDepth("the expansion terminated: input is rational",
                                where="numberlab.estimate_irrationality_exponent")
    if s.depth < 4:
        raise InsufficientDepth(f"need depth >= 4, have {s.depth}",
                                where="numberlab.estimate_irrationality_exponent")
    center = s.center
    xs, ys = [], []
    for c in convergents(s)[:-1]:
        if c.q < 2:
            continue
        err = abs(center - Fraction(c.p, c.q))
        if err == 0:
            continue
        xs.append(_ln(c.q))
        ys.append(-_ln(err))
    local = [y / x for x, y in zip(xs, ys)]

    records: list[float] = []
    jumps: list[int] = []
    for i, e in enumerate(local):
        if not records or e > records[-1]:
            if records and e - records[-1] > tol:
                jumps.append(i)
            records.append(e)

    m = len(xs)
    w = max(2, m // 2)
    fits = tuple(_ols_slope(xs[j - w:j], ys[j - w:j]) for j in (m - 2, m - 1, m) if j - w >= 0) if m >= w + 2 else ()

    if len(jumps) >= 3 and jumps[-1] >= m / 3:
        return IrrationalityEstimate(max(records), s.depth, "liouville-suspect", fits, tuple(records))
    if len(fits) == 3 and max(fits) - min(fits) <= tol:
        # Dirichlet: every irrational has exponent >= 2
        return IrrationalityEstimate(max(2.0, fits[-1]), s.depth, "diophantine", fits, tuple(records))
    exponent = max(2.0, fits[-1]) if fits else float("nan")
    return IrrationalityEstimate(exponent, s.depth, "undecided", fits, tuple(records))


# ---------------------------------------------------------------------------
# small divisors

def reduce_fraction(x: Fraction, slack: Fraction = Fraction(0), relative: bool = True,
                    where: str = "numberlab.reduce_fraction"):
    """``x = n + t`` with ``n`` the nearest integer and ``|t| <= 1/2``.

    ``slack`` bounds the uncertainty of ``x``. With ``relative`` it must be
    far below ``|t|`` so that ``sin(pi t)`` keeps its leading bits; otherwise
    it only has to be far below 1.
    """
    n = math.floor(x + Fraction(1, 2))
    t = x - n
    if slack:
        scale = abs(t) if relative else Fraction(1)
        if slack * 2**30 > scale:
            raise PrecisionExhausted("enclosure too wide to resolve the phase", where=where)
    return n, t


def reduce_mode(k: int, s: SlopeNumber) -> tuple[int, Fraction]:
    """``k*eta = n + t`` computed exactly from the enclosure midpoint."""
    return reduce_fraction(k * s.center, abs(k) * s.radius, where="numberlab.reduce_mode")


def unit_phase(x: Fraction, slack: Fraction = Fraction(0), prec: int = PHASE_PREC) -> mpmath.mpc:
    """``exp(2*pi*i*x)`` after exact reduction of ``x`` modulo 1."""
    _, t = reduce_fraction(x, slack, relative=False, where="numberlab.unit_phase")
    with mpmath.workprec(prec):
        return mpmath.expjpi(2 * to_mpf(t, prec))


def half_phase(k: int, s: SlopeNumber, prec: int = PHASE_PREC) -> mpmath.mpc:
    """``exp(pi*i*k*eta)`` evaluated as ``(-1)**n * exp(pi*i*t)``."""
    n, t = reduce_mode(k, s)
    with mpmath.workprec(prec):
        z = mpmath.expjpi(to_mpf(t, prec))
        return -z if n % 2 else z


def small_divisor(k: int, s: SlopeNumber, prec: int = PHASE_PREC) -> mpmath.mpf:
    """``|exp(2*pi*i*k*eta) - 1| = 2|sin(pi*k*eta)|``, relative accuracy 2**-prec."""
    if k == 0:
        raise ZeroMode("small divisor undefined at k = 0", where="numberlab.small_divisor")
    _, t = reduce_mode(k, s)
    with mpmath.workprec(prec):
        return 2 * abs(mpmath.sinpi(to_mpf(t, prec)))


# ---------------------------------------------------------------------------
# Liouville numbers

def build_liouville_number(order: int, max_digits: int = 100_000) -> LiouvilleWitness:
    """Certified Liouville-type slope ``eta = sum_s 10**-(s!)``.

    The series is kept to ``N = order + 1`` terms; the remaining tail lies in
    ``(10**-(N+1)!, 2*10**-(N+1)!)`` and becomes the enclosure. Pairs are the
    truncations ``p_s/k_s`` with ``k_s = 10**(s!)``, ``s = 2..order``, each
    verified exactly against both ends of the enclosure.
    """
    if order < 2:
        raise ValueError("order must be >= 2")
    n_terms = order + 1
    tail_exp = math.factorial(n_terms + 1)
    if tail_exp > max_digits:
        raise PrecisionExhausted(
            f"order {order} needs {tail_exp} digits, limit is {max_digits}",
            where="numberlab.build_liouville_number",
        )
    partial = [Fraction(0)]
    for j in range(1, n_terms + 1):
        partial.append(partial[-1] + Fraction(1, 10 ** math.factorial(j)))
    unit = Fraction(1, 10**tail_exp)
    lo, hi = partial[-1] + unit, partial[-1] + 2 * unit
    quotients, status = _certified_quotients(lo, hi, 10**6)
    prec = int(math.ceil(tail_exp * math.log2(10))) + 32
    eta = SlopeNumber(to_mpf((lo + hi) / 2, prec), tuple(quotients), lo, hi, prec, status == "rational")

    pairs, orders = [], []
    for s in range(2, order + 1):
        k = 10 ** math.factorial(s)
        p = int(partial[s] * k)
        pairs.append((p, k))
        orders.append(s)
    witness = LiouvilleWitness(eta, tuple(pairs), tuple(orders), order)
    if not witness.verify():
        raise PrecisionExhausted("certificate failed", where="numberlab.build_liouville_number")
    return witness


def witness_from_convergents(s: SlopeNumber, min_order: int = 2) -> LiouvilleWitness:
    """Certified pairs read off the convergents of ``s``.

    For each convergent the largest integer order ``t`` with
    ``|s - p/q| < q**-t`` over the whole enclosure is found exactly; a pair is
    kept when its order beats every earlier one.
    """
    pairs, orders = [], []
    best = min_order - 1
    for c in convergents(s)[:-1]:
        if c.q < 2:
            continue
        target = Fraction(c.p, c.q)
        err = max(abs(s.lower - target), abs(s.upper - target))
        if err == 0:
            continue
        t = max(1, int(-_ln(err) / _ln(c.q)) + 1)
        while t > 1 and not err < Fraction(1, c.q**t):
            t -= 1
        while err < Fraction(1, c.q ** (t + 1)):
            t += 1
        if err < Fraction(1, c.q**t) and t > best:
            pairs.append((c.p, c.q))
            orders.append(t)
            best = t
    return LiouvilleWitness(s, tuple(pairs), tuple(orders), orders[-1] if orders else 0)
