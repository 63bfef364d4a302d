"""Fourier-mode gluing systems on the torus with an irrational-slope foliation.

The torus is covered by two vertical charts whose overlap has two
components. Restricting flat sections to the fibres ``theta = 0`` and
``theta = 1/2`` turns the Mayer-Vietoris map into one 2x2 system per Fourier
mode ``k``:

    foliated:     w^_k = u_k - v_k,   w_k = e(k) u_k - e(k)^-1 v_k
    prequantum:   w^_k = u_k - v_k,   w_k = g(k)^-1 u_k - g(k) v_{k-p}

with ``e(k) = exp(pi i k eta)`` and ``g(k) = exp(pi i (k eta + p/eta))``.
The half-turn in both phases comes from the seam sitting half way up the
circle (``SEAM``).

Coefficients are mpmath numbers: near a Liouville slope the divisors reach
``1e-4000`` and beyond, far outside double range. Phases are reduced modulo
1 in exact rational arithmetic before any transcendental is evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .errors import (CutoffMismatch, CutoffTooSmall, InsufficientDepth, InsufficientWitness,
                     SeedCountMismatch)
from .numberlab import (PHASE_PREC, LiouvilleWitness, SlopeNumber, estimate_irrationality_exponent,
                        half_phase, small_divisor, unit_phase, witness_from_convergents)
from .quantize import CohomologySummary, Dim

DEFAULT_CUTOFF = 4096
MIN_CUTOFF = 32
DEFAULT_ORDERS = (1, 2, 4, 8)
DECAY_THRESHOLD = 1e-6
NON_DECAY_FLOOR = 1.0 / (4.0 * math.pi)
SOLVER_TOL = 1e-12
# height of the seam between the two charts, as a fraction of the circle
SEAM = Fraction(1, 2)


# ---------------------------------------------------------------------------
# data

@dataclass(frozen=True)
class FourierVector:
    """Finitely supported coefficients ``k -> c_k`` with ``|k| <= cutoff``."""

    coefficients: dict
    cutoff: int

    def __post_init__(self):
        if self.cutoff < 0:
            raise ValueError("cutoff must be >= 0")
        for k in self.coefficients:
            if abs(k) > self.cutoff:
                raise ValueError(f"mode {k} outside cutoff {self.cutoff}")

    def __getitem__(self, k: int):
        return self.coefficients.get(k, mpmath.mpc(0))

    def __len__(self):
        return len(self.coefficients)

    def modes(self) -> list[int]:
        return sorted(self.coefficients)

    def items(self):
        return ((k, self.coefficients[k]) for k in self.modes())

    @classmethod
    def zeros(cls, cutoff: int) -> "FourierVector":
        return cls({}, cutoff)

    @classmethod
    def delta(cls, k: int, cutoff: int, value=1) -> "FourierVector":
        return cls({k: mpmath.mpc(value)}, cutoff)

    @classmethod
    def from_function(cls, fn, cutoff: int) -> "FourierVector":
        """Dense vector with ``c_k = fn(k)``; exact zeros are not stored."""
        out = {}
        for k in range(-cutoff, cutoff + 1):
            c = mpmath.mpc(fn(k))
            if c != 0:
                out[k] = c
        return cls(out, cutoff)

    def max_abs(self):
        return max((abs(c) for c in self.coefficients.values()), default=mpmath.mpf(0))

    def to_json(self) -> dict:
        return {"cutoff": self.cutoff,
                "entries": [[k, c.real, c.imag] for k, c in self.items()]}

    @classmethod
    def from_json(cls, data: dict) -> "FourierVector":
        entries = {}
        for k, re, im in data.get("entries", []):
            k = int(k)
            entries[k] = entries.get(k, 0) + mpmath.mpc(re, im)
        return cls(entries, int(data["cutoff"]))


@dataclass(frozen=True)
class DecayReport:
    tested_orders: tuple[int, ...]
    verdicts: dict
    tail_window: tuple[int, int]
    smooth_verdict: str
    statistics: dict = field(default_factory=dict)
    sub_windows: dict = field(default_factory=dict)
    floor_hits: tuple[int, ...] = ()

    def to_json(self) -> dict:
        return {
            "tested_orders": list(self.tested_orders),
            "verdicts": {str(s): self.verdicts[s] for s in self.tested_orders},
            "tail_window": list(self.tail_window),
            "smooth_verdict": self.smooth_verdict,
            "statistics": {str(s): self.statistics[s] for s in self.tested_orders},
            "floor_hits": list(self.floor_hits),
        }


@dataclass(frozen=True)
class MVSolveResult:
    u: FourierVector
    v: FourierVector
    free_parameters: list
    residual: float
    status: str  # "solved" | "no-solution" | "solved-with-growth"
    obstruction: str | None = None
    extras: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"status": self.status}
        if self.obstruction is not None:
            out["obstruction"] = self.obstruction
        out["residual"] = self.residual
        out["free_parameters"] = self.free_parameters
        if self.status != "no-solution":
            out["u"] = self.u
            out["v"] = self.v
        out.update(self.extras)
        return out


def _check_cutoffs(a: FourierVector, b: FourierVector, where: str) -> int:
    if a.cutoff != b.cutoff:
        raise CutoffMismatch(f"cutoffs differ ({a.cutoff} vs {b.cutoff})", where=where)
    return a.cutoff


def _scaled(err, *sizes):
    return err / max([mpmath.mpf(1)] + [abs(s) for s in sizes])


# ---------------------------------------------------------------------------
# foliated system

def foliated_denominator(k: int, eta: SlopeNumber, prec: int = PHASE_PREC) -> mpmath.mpc:
    """``e(k) - e(k)**-1 = 2i sin(pi k eta)``; its modulus is the small divisor."""
    z = half_phase(k, eta, prec)
    with mpmath.workprec(prec):
        return z - mpmath.conj(z)


def solve_foliated(eta: SlopeNumber, w_hat: FourierVector, w: FourierVector, v0=0,
                   prec: int = PHASE_PREC, tol: float = SOLVER_TOL,
                   growth_orders=DEFAULT_ORDERS) -> MVSolveResult:
    """Solve the foliated gluing system mode by mode.

    Mode 0 is solvable only when ``w^_0 = w_0``; then ``v_0`` is free
    (``v0``, default 0) and ``u_0 = w^_0 + v_0``.
    """
    K = _check_cutoffs(w_hat, w, "cohomeq.solve_foliated")
    modes = sorted(set(w_hat.coefficients) | set(w.coefficients) | ({0} if v0 else set()))
    u, v = {}, {}
    residual = mpmath.mpf(0)
    status, obstruction, free = "solved", None, []
    with mpmath.workprec(prec):
        a0, b0 = w_hat[0], w[0]
        if abs(a0 - b0) > tol * max(1, abs(a0), abs(b0)):
            status, obstruction = "no-solution", "w0_mismatch"
        else:
            v0 = mpmath.mpc(v0)
            free.append({"name": "v0", "mode": 0, "value": v0})
            if a0 + v0 != 0:
                u[0] = a0 + v0
            if v0 != 0:
                v[0] = v0
        for k in modes:
            if k == 0:
                continue
            e = half_phase(k, eta, prec)
            ei = mpmath.conj(e)
            d = e - ei
            a, b = w_hat[k], w[k]
            uk = (b - ei * a) / d
            vk = (b - e * a) / d
            u[k], v[k] = uk, vk
            r1 = abs(uk - vk - a)
            r2 = abs(e * uk - ei * vk - b)
            residual = max(residual, _scaled(max(r1, r2), uk, vk))
        if status == "solved":
            residual = max(residual, _scaled(abs(u.get(0, 0) - v.get(0, 0) - a0), u.get(0, 0), v.get(0, 0)))
    U, V = FourierVector(u, K), FourierVector(v, K)
    if status == "solved" and K >= MIN_CUTOFF:
        status = _growth_status(U, V, w_hat, w, growth_orders)
    return MVSolveResult(U, V, free, float(residual), status, obstruction)


def _growth_status(u, v, w_hat, w, orders) -> str:
    data_smooth = all(classify_decay(c, orders).smooth_verdict == "smooth-compatible"
                      for c in (w_hat, w) if len(c))
    sol_smooth = all(classify_decay(c, orders).smooth_verdict == "smooth-compatible"
                     for c in (u, v) if len(c))
    return "solved-with-growth" if data_smooth and not sol_smooth else "solved"


# ---------------------------------------------------------------------------
# prequantum system

class _PrequantumPhases:
    """``g(k) = exp(pi i (k eta + p/eta))`` with ``eta`` and ``1/eta`` rounded
    once to dyadics: the phases need absolute accuracy only, and the exact
    enclosure of a Liouville slope has tens of thousands of digits."""

    def __init__(self, eta: SlopeNumber, p: int, K: int, prec: int):
        if eta.lower <= 0 <= eta.upper:
            raise InsufficientDepth("slope enclosure contains 0", where="cohomeq.prequantum_phase")
        bits = prec + 64 + max(1, int(K)).bit_length()
        scale = 2**bits
        c = eta.center
        self.c = Fraction(round(c * scale), scale)
        self.inv = Fraction(round(scale / c), scale)
        # dyadic upper bounds keep the per-mode slack arithmetic small
        rad = eta.radius
        inv_rad = rad / min(abs(eta.lower), abs(eta.upper)) ** 2
        self.r = Fraction(math.ceil(rad * scale) + 1, scale)
        self.inv_r = Fraction(math.ceil(inv_rad * scale) + 1, scale)
        self.p, self.prec = p, prec
        self.cache = {}

    def __call__(self, k: int) -> mpmath.mpc:
        if k not in self.cache:
            x = SEAM * (k * self.c + self.p * self.inv)
            slack = SEAM * (abs(k) * self.r + self.p * self.inv_r)
            self.cache[k] = unit_phase(x, slack, self.prec)
        return self.cache[k]


def prequantum_phase(k: int, eta: SlopeNumber, p: int, prec: int = PHASE_PREC) -> mpmath.mpc:
    """``g(k) = exp(pi i (k eta + p/eta))``."""
    return _PrequantumPhases(eta, p, abs(k), prec)(k)


def solve_prequantum(eta: SlopeNumber, p: int, w_hat: FourierVector, w: FourierVector,
                     seeds=None, prec: int = PHASE_PREC) -> MVSolveResult:
    """March the prequantum recurrence out of ``p`` seed values.

    ``seeds[r]`` is ``v_r`` for ``r = 0..p-1``; each residue class mod ``p``
    is filled forward to ``+K`` and backward to ``-K`` from its seed, and
    ``u_k = w^_k + v_k``. Seeds default to zero.
    """
    K = _check_cutoffs(w_hat, w, "cohomeq.solve_prequantum")
    if p < 1:
        raise ValueError("p must be >= 1")
    if seeds is None:
        seeds = [0] * p
    seeds = list(seeds)
    if len(seeds) != p:
        raise SeedCountMismatch(f"need {p} seeds, got {len(seeds)}", where="cohomeq.solve_prequantum")
    if p - 1 > K:
        raise SeedCountMismatch("seed modes exceed the cutoff", where="cohomeq.solve_prequantum")
    v: dict[int, mpmath.mpc] = {}
    with mpmath.workprec(prec):
        g = _PrequantumPhases(eta, p, K, prec)

        def rhs(k, gk):
            return w[k] - mpmath.conj(gk) * w_hat[k]

        for r in range(p):
            v[r] = mpmath.mpc(seeds[r])
            for k in range(r + p, K + 1, p):
                gk = g(k)
                v[k] = gk * rhs(k, gk) + gk * gk * v[k - p]
            for k in range(r, -K + p - 1, -p):
                gk = g(k)
                gi = mpmath.conj(gk)
                v[k - p] = gi * gi * v[k] - gi * rhs(k, gk)
        u = {k: w_hat[k] + v[k] for k in v}
        residual = mpmath.mpf(0)
        for k in range(-K + p, K + 1):
            gk = g(k)
            gi = mpmath.conj(gk)
            r1 = abs(u[k] - v[k] - w_hat[k])
            r2 = abs(gi * u[k] - gk * v[k - p] - w[k])
            residual = max(residual, _scaled(max(r1, r2), u[k], v[k], v[k - p]))
    u = {k: c for k, c in u.items() if c != 0}
    v = {k: c for k, c in v.items() if c != 0}
    free = [{"name": f"v{r}", "mode": r, "value": mpmath.mpc(seeds[r])} for r in range(p)]
    return MVSolveResult(FourierVector(u, K), FourierVector(v, K), free, float(residual), "solved")


# ---------------------------------------------------------------------------
# decay

def classify_decay(c: FourierVector, orders=DEFAULT_ORDERS, threshold: float = DECAY_THRESHOLD,
                   floor: float = NON_DECAY_FLOOR) -> DecayReport:
    """Finite-data smoothness test on Fourier coefficients.

    For each order ``s`` the statistic is ``max |c_k|/(1+|k|**s)`` over the
    tail ``K/2 <= |k| <= K``, relative to the largest stored coefficient.
    Order ``s`` decays when the statistic is below ``threshold`` and the
    outer half of the tail does not exceed the inner half (vacuous when a
    half holds no stored mode). ``not-smooth`` means some tail coefficient
    stays above the absolute ``floor``; ``smooth-compatible`` means every
    order decays.
    """
    K = c.cutoff
    if K < MIN_CUTOFF:
        raise CutoffTooSmall(f"cutoff {K} < {MIN_CUTOFF}", where="cohomeq.classify_decay")
    orders = tuple(int(s) for s in orders)
    lo, mid = Fraction(K, 2), Fraction(3 * K, 4)
    scale = c.max_abs()
    tail = [(k, abs(x)) for k, x in c.items() if lo <= abs(k) <= K]
    inner = [(k, a) for k, a in tail if abs(k) < mid]
    outer = [(k, a) for k, a in tail if abs(k) >= mid]
    verdicts, stats, windows = {}, {}, {}
    for s in orders:
        def stat(part):
            if not part or scale == 0:
                return mpmath.mpf(0)
            return max(a / (1 + mpmath.mpf(abs(k)) ** s) for k, a in part) / scale

        t = stat(tail)
        si, so = stat(inner), stat(outer)
        monotone = not inner or not outer or so <= si
        stats[s] = t
        windows[s] = (si, so)
        verdicts[s] = "decays" if (t < threshold and monotone) else "fails"
    hits = tuple(k for k, x in c.items() if abs(x) >= floor)
    if any(a >= floor for _, a in tail):
        verdict = "not-smooth"
    elif all(verdicts[s] == "decays" for s in orders):
        verdict = "smooth-compatible"
    else:
        verdict = "inconclusive"
    return DecayReport(orders, verdicts, ((K + 1) // 2, K), verdict, stats, windows, hits)


# ---------------------------------------------------------------------------
# Liouville witness

def liouville_data(witness: LiouvilleWitness, K: int, bump: int | None = None) -> FourierVector:
    """``w_{k_s} = a_s / k_s**(s-1)`` on the in-cutoff pairs, with ``a_s = 1``
    except ``a_bump = 2``."""
    entries = {}
    for s, (_, k) in zip(witness.orders, witness.pairs):
        if k <= K:
            a = 2 if s == bump else 1
            entries[k] = mpmath.mpc(mpmath.mpf(a) / mpmath.mpf(k) ** (s - 1))
    return FourierVector(entries, K)


def liouville_witness_run(witness: LiouvilleWitness, K: int | None = None, bump: int | None = None,
                          orders=DEFAULT_ORDERS, prec: int = PHASE_PREC):
    """Smooth data whose foliated solution is not smooth.

    Returns ``(w, result, report)`` where ``report`` classifies ``v``. The
    cutoff defaults to the largest ``k_s`` so every pair is in range.
    Raises if the first-order bound ``|v_{k_s}| >= 1/(2 pi)`` fails.
    """
    if K is None:
        K = max((k for _, k in witness.pairs), default=0)
    in_cut = [(s, k) for s, (_, k) in zip(witness.orders, witness.pairs) if k <= K]
    if len(in_cut) < 3:
        raise InsufficientWitness(f"only {len(in_cut)} witness pairs within cutoff {K}",
                                  where="cohomeq.liouville_witness_run")
    w = liouville_data(witness, K, bump)
    result = solve_foliated(witness.eta, FourierVector.zeros(K), w, prec=prec, growth_orders=orders)
    bound = 1 / (2 * mpmath.pi)
    moduli = {k: abs(result.v[k]) for _, k in in_cut}
    bad = [k for k, m in moduli.items() if m < bound]
    if bad:
        raise InsufficientWitness(f"bound fails at {len(bad)} witness modes",
                                  where="cohomeq.liouville_witness_run")
    report = classify_decay(result.v, orders)
    extras = dict(result.extras)
    extras["witness_moduli"] = [[k, moduli[k]] for _, k in in_cut]
    result = MVSolveResult(result.u, result.v, result.free_parameters, result.residual,
                           result.status, result.obstruction, extras)
    return w, result, report


def cokernel_witnesses(witness: LiouvilleWitness, K: int | None = None, prec: int = PHASE_PREC):
    """Solutions for the base data ``a(0)`` and each perturbation ``a(r)``.

    The perturbed solutions differ from the base one exactly at ``k_r``; the
    differences are linearly independent non-smooth directions of the
    cokernel.
    """
    _, base, _ = liouville_witness_run(witness, K, prec=prec)
    out = []
    for s, (_, k) in zip(witness.orders, witness.pairs):
        if K is not None and k > K:
            continue
        _, pert, _ = liouville_witness_run(witness, K, bump=s, prec=prec)
        diff = {m: pert.v[m] - base.v[m] for m in set(pert.v.coefficients) | set(base.v.coefficients)
                if pert.v[m] != base.v[m]}
        out.append((s, k, diff))
    return base, out


# ---------------------------------------------------------------------------
# classification

def _parse_mode(mode):
    if mode == "foliated":
        return "foliated", None
    if isinstance(mode, dict) and "prequantum" in mode:
        return "prequantum", int(mode["prequantum"])
    if isinstance(mode, (tuple, list)) and len(mode) == 2 and mode[0] == "prequantum":
        return "prequantum", int(mode[1])
    raise ValueError(f"unknown mode {mode!r}")


def prequantum_witness(eta: SlopeNumber, p: int, K: int = 64) -> dict:
    """The ``w^ = 0, w = delta_0`` run with ``v_0 = 1``: flat modulus along
    multiples of ``p``, so ``v`` cannot decay in both directions."""
    seeds = [1] + [0] * (p - 1)
    res = solve_prequantum(eta, p, FourierVector.zeros(K), FourierVector.delta(0, K), seeds)
    pos = [abs(res.v[m]) for m in range(p, K + 1, p)]
    neg = [abs(res.v[m]) for m in range(-2 * p, -K - 1, -p)]
    v_minus = abs(res.v[-p])
    dev = max([abs(x - 1) for x in pos] + [abs(x - v_minus) for x in neg])
    return {"run": "solve_prequantum", "p": p, "cutoff": K, "v0": 1.0, "abs_v_minus_p": v_minus,
            "max_modulus_deviation": dev, "residual": res.residual}


def classify_h1(eta: SlopeNumber, mode="foliated", witness_cutoff: int | None = None) -> CohomologySummary:
    """``(H^0, H^1)`` of the irrational-slope torus, foliated or prequantum."""
    kind, p = _parse_mode(mode)
    if kind == "prequantum":
        if p < 1:
            raise ValueError("p must be >= 1")
        info = prequantum_witness(eta, p)
        return CohomologySummary({0: Dim.finite(0), 1: Dim.infinite("solve_prequantum:w=delta_0")}, 1,
                                 extras={"mode": {"prequantum": p}, "witness": info})
    est = estimate_irrationality_exponent(eta)
    extras = {"mode": "foliated", "estimate": est.to_json()}
    if est.classification == "diophantine":
        h1 = Dim.finite(1)
        extras["quantization"] = "C + C"
    elif est.classification == "liouville-suspect":
        wit = witness_from_convergents(eta)
        try:
            _, res, rep = liouville_witness_run(wit, witness_cutoff)
            extras["witness"] = {"pairs": len(wit.pairs), "order_reached": wit.order_reached,
                                 "smooth_verdict": rep.smooth_verdict, "floor_hits": len(rep.floor_hits)}
            h1 = Dim.infinite("liouville_witness_run")
        except InsufficientWitness as exc:
            extras["witness_error"] = str(exc)
            h1 = Dim.symbolic(f"undecided at depth {est.depth_used}")
    else:
        h1 = Dim.symbolic(f"undecided at depth {est.depth_used}")
    return CohomologySummary({0: Dim.finite(1), 1: h1}, 1, extras=extras)


def mode_table(result: MVSolveResult, eta: SlopeNumber, which: str = "v"):
    """Rows ``(k, re, im, |c_k|, divisor)`` for CSV export."""
    vec = getattr(result, which)
    rows = []
    for k, c in vec.items():
        d = small_divisor(k, eta) if k else mpmath.mpf(0)
        rows.append((k, c.real, c.imag, abs(c), d))
    return rows
