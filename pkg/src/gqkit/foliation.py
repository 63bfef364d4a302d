"""Generic foliations of the torus: closed leaves with linear monodromy.

Near a nondegenerate closed leaf the foliation is ``ker(dr + lam*r*dtheta)``
with ``theta`` of period 1, so a leaf starting at height ``r`` returns at
``exp(-lam)*r``. Flat sections along a spiralling leaf converge onto the
closed leaf exactly when the closed leaf is Bohr-Sommerfeld; the torus
cohomology is assembled from these annuli by repeated Mayer-Vietoris gluing.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateTangency, OutOfDomain
from .quantize import CohomologySummary, Dim, ExactSequenceInstance, check_exactness

PHASE_TOL = 1e-8
HALF_WIDTH = 1.0
GAP_TOL = 1e-10


@dataclass(frozen=True)
class LeafData:
    """A closed leaf.

    ``transport_phase`` is the prequantum holonomy along the leaf and decides
    ``is_bs``. ``crossing_phase`` is the factor picked up by a flat section
    carried across the annulus from this leaf to the next one; the cyclic
    product of these factors is the global compatibility condition for
    ``H^0``.
    """

    monodromy_lambda: float
    is_bs: bool
    transport_phase: complex = 1.0
    label: int = 0
    crossing_phase: complex = 1.0
    tol: float = PHASE_TOL

    def __post_init__(self):
        if self.monodromy_lambda == 0 or not math.isfinite(self.monodromy_lambda):
            raise ValueError("a nondegenerate leaf needs a finite nonzero lambda")
        for z in (self.transport_phase, self.crossing_phase):
            if abs(abs(z) - 1) > self.tol:
                raise ValueError(f"phase {z} is not unit modulus")
        if self.is_bs != (abs(complex(self.transport_phase) - 1) <= self.tol):
            raise ValueError("is_bs disagrees with the transport phase")

    @classmethod
    def from_phase(cls, lam: float, phase: complex, label: int = 0, crossing: complex = 1.0,
                   tol: float = PHASE_TOL) -> "LeafData":
        phase = complex(phase)
        return cls(float(lam), abs(phase - 1) <= tol, phase, label, complex(crossing), tol)

    @classmethod
    def bs(cls, lam: float, label: int = 0, crossing: complex = 1.0) -> "LeafData":
        return cls(float(lam), True, 1.0 + 0j, label, complex(crossing))

    def to_json(self) -> dict:
        p, c = complex(self.transport_phase), complex(self.crossing_phase)
        out = {"lambda": self.monodromy_lambda, "bs": self.is_bs, "phase": [p.real, p.imag]}
        if c != 1:
            out["crossing"] = [c.real, c.imag]
        return out


@dataclass(frozen=True)
class FoliationModel:
    variant: str  # "irrational" | "generic"
    mode: object = "foliated"  # "foliated" or {"prequantum": p}
    eta: object = None
    leaves: tuple = ()

    def __post_init__(self):
        if self.variant == "irrational":
            if self.eta is None:
                raise ValueError("irrational variant needs eta")
        elif self.variant == "generic":
            if len(self.leaves) < 1:
                raise ValueError("a generic model needs at least one closed leaf")
        else:
            raise ValueError(f"unknown variant {self.variant!r}")

    @property
    def n_leaves(self) -> int:
        return len(self.leaves)

    @property
    def foliated(self) -> bool:
        return self.mode == "foliated"


@dataclass(frozen=True)
class TangencyReport:
    mu_plus: int
    mu_minus: int
    locations: tuple = ()
    signs: tuple = ()

    def to_json(self) -> dict:
        return {"mu_plus": self.mu_plus, "mu_minus": self.mu_minus,
                "locations": list(self.locations), "signs": list(self.signs)}


# ---------------------------------------------------------------------------
# local model

def return_map(leaf: LeafData, r: float, half_width: float = HALF_WIDTH) -> float:
    """First return to the transversal ``theta = 0``: ``r -> exp(-lam)*r``."""
    if abs(r) > half_width:
        raise OutOfDomain(f"|r|={abs(r)} outside the model annulus", where="foliation.return_map")
    return math.exp(-leaf.monodromy_lambda) * r


def iterate_return_map(leaf: LeafData, r: float, n: int) -> float:
    return math.exp(-n * leaf.monodromy_lambda) * r


@dataclass(frozen=True)
class FlatLimitTrace:
    gaps: np.ndarray
    exists: bool
    fitted_c: float
    fitted_rate: float


def flat_limit_trace(leaf: LeafData, r0: float = 0.5, coupling: float = 1.0,
                     n_iter: int | None = None, gap_tol: float = GAP_TOL) -> FlatLimitTrace:
    """Follow a flat section down a spiralling leaf towards the closed leaf.

    The connection is ``d + alpha`` with ``alpha = (phase exponent) dtheta +
    coupling*r dtheta`` near the leaf. Turn ``n`` sweeps heights from
    ``r_n`` to ``r_{n+1}`` and multiplies the section by
    ``F_n = phase * exp(2 pi i coupling * int r dtheta)``, so successive
    values on the transversal differ by ``|F_n - 1|``. The spiral always runs
    in the contracting direction (``theta -> -theta`` when ``lam < 0``).
    """
    lam = abs(leaf.monodromy_lambda)
    if n_iter is None:
        n_iter = max(16, int(math.ceil(34.0 / lam)))
    base = cmath.phase(complex(leaf.transport_phase))
    n = np.arange(n_iter)
    # int_0^1 r_n exp(-lam*theta) dtheta
    sweep = r0 * np.exp(-lam * n) * (-math.expm1(-lam)) / lam
    angle = base + 2 * math.pi * coupling * sweep
    gaps = 2 * np.abs(np.sin(0.5 * angle))
    exists = bool(gaps[-1] <= gap_tol)
    with np.errstate(divide="ignore"):
        logs = np.log(gaps)
    ok = np.isfinite(logs)
    if exists and ok.sum() >= 2:
        rate = -float(np.polyfit(n[ok], logs[ok], 1)[0])
        c = float(np.max(gaps[ok] * np.exp(lam * n[ok])))
    else:
        rate, c = 0.0, float("inf")
    return FlatLimitTrace(gaps, exists, c, rate)


def flat_limit_exists(leaf: LeafData, **kw) -> bool:
    return flat_limit_trace(leaf, **kw).exists


def annulus_quantize(leaf: LeafData) -> CohomologySummary:
    """Nondegenerate annulus: ``H^0 = C`` on a BS leaf else 0, ``H^1 = C``."""
    return CohomologySummary.from_dims([1 if leaf.is_bs else 0, 1])


def cotangent_annulus_quantize(n_bs: int) -> CohomologySummary:
    """Circle-fibred annulus with vertical polarization and ``n_bs`` BS leaves."""
    from .quantize import sniatycki_quantize

    return sniatycki_quantize(1, n_bs)


# ---------------------------------------------------------------------------
# tangencies

def _line_field_samples(field_, xs, ys):
    if callable(field_):
        vals = np.array([field_(x, y) for x, y in zip(xs, ys)], dtype=float)
    else:
        vals = np.asarray(field_, dtype=float)
    if vals.shape != (len(xs), 2):
        raise ValueError("line field must give one 2-vector per curve sample")
    return vals


def tangency_count(t, f, field_, closed: bool = True, zero_tol: float = 1e-12) -> TangencyReport:
    """Signed tangencies of the loop ``gamma(t) = (t, f(t))`` with a line field.

    ``t`` is a uniform grid on one period and ``f`` the curve samples; the
    field is a callable ``L(x, theta) -> (a, b)`` or an array of vectors at
    the samples. Tangencies are sign changes of ``D = det(gamma', L)``. A
    tangency is positive when ``L`` turns counterclockwise relative to
    ``gamma'`` through it. A zero of ``D`` without a sign change inside a
    3-sample window raises :class:`DegenerateTangency`.
    """
    t = np.asarray(t, dtype=float)
    f = np.asarray(f, dtype=float)
    n = len(t)
    if n < 8 or f.shape != t.shape:
        raise ValueError("need at least 8 matching samples")
    h = t[1] - t[0]
    if closed:
        df = (np.roll(f, -1) - np.roll(f, 1)) / (2 * h)
    else:
        df = np.gradient(f, h)
    tangent = np.stack([np.ones(n), df], axis=1)
    L = _line_field_samples(field_, t, f)
    D = tangent[:, 0] * L[:, 1] - tangent[:, 1] * L[:, 0]
    cos = np.einsum("ij,ij->i", tangent, L)
    scale = max(float(np.max(np.abs(D))), float(np.max(np.abs(cos))), 1e-300)
    sign = np.where(np.abs(D) <= zero_tol * scale, 0, np.sign(D)).astype(int)
    if not np.any(sign):
        raise DegenerateTangency("det(gamma', L) vanishes identically", where="foliation.tangency_count")

    idx = range(n) if closed else range(n - 1)
    locations, signs = [], []
    for i in idx:
        j = (i + 1) % n
        a, b = sign[i], sign[j]
        if a == 0:
            continue
        if b == -a:
            # crossing between samples i and j
            s = D[i] / (D[i] - D[j])
            loc = t[i] + s * h
            c = cos[i] if abs(cos[i]) >= abs(cos[j]) else cos[j]
        elif b == 0:
            k = (i + 2) % n
            if (not closed and i + 2 >= n) or sign[k] != -a:
                raise DegenerateTangency(f"non-transverse zero near t={t[j]:.6g}",
                                         where="foliation.tangency_count")
            loc, c = t[j], cos[j]
        else:
            continue
        # D goes from a to -a; relative angle of L increases iff D rises with cos > 0
        rising = a < 0
        positive = rising == (c > 0)
        locations.append(float(loc % 1.0) if closed else float(loc))
        signs.append(1 if positive else -1)
    order = np.argsort(locations)
    locations = [locations[k] for k in order]
    signs = [signs[k] for k in order]
    return TangencyReport(signs.count(1), signs.count(-1), tuple(locations), tuple(signs))


# ---------------------------------------------------------------------------
# torus cohomology

def _h1_expression(flags, n_finite):
    parts = [("C^inf(S^1)/C" if b else "C^inf(S^1)") for b in flags]
    if n_finite:
        parts.append("C" if n_finite == 1 else f"C^{n_finite}")
    return " + ".join(parts) if parts else "0"


def torus_cohomology(model: FoliationModel, tol: float = PHASE_TOL):
    """``(summary, trace)`` for a foliation model of the torus.

    For generic models the cover is the ``N`` nondegenerate annuli around
    the closed leaves plus one cotangent annulus closing the cycle. Each
    gluing step is audited on finite data: the ``H^0`` count and the finite
    part of ``H^1``.
    """
    if model.variant == "irrational":
        from .cohomeq import classify_h1

        return classify_h1(model.eta, model.mode), []

    leaves = model.leaves
    N = len(leaves)
    flags = [1 if (model.foliated or leaf.is_bs) else 0 for leaf in leaves]
    if model.foliated:
        crossing_ok = True
    else:
        prod = complex(1.0)
        for leaf in leaves:
            prod *= complex(leaf.crossing_phase)
        crossing_ok = abs(prod - 1) <= tol

    trace = []
    h0 = flags[0]
    finite = 1
    comps: list[int] = []
    trace.append({"step": 0, "glued": "U_1 = V_1", "h0": h0, "finite_part": finite,
                  "infinite_components": 0, "quotient_flags": [], "audits": [], "exact": True})
    for j in range(1, N):
        b = flags[j]
        new_h0 = h0 * b
        r = h0 + b - new_h0
        a0 = ExactSequenceInstance((0, new_h0, h0 + b, r), ("0", "H0(U_j+1)", "H0(U_j)+H0(V_j+1)", "rank"))
        a1 = ExactSequenceInstance((0, finite + 1, finite + 1, 0), ("0", "H1 finite(U_j+1)", "H1 finite(U_j)+H1(V_j+1)", "0"))
        h0, finite = new_h0, finite + 1
        comps.append(b)
        trace.append({"step": j, "glued": f"U_{j + 1} = U_{j} + V_{j + 1}", "h0": h0, "finite_part": finite,
                      "infinite_components": len(comps), "quotient_flags": list(comps),
                      "audits": [a0, a1], "exact": check_exactness(a0) and check_exactness(a1)})
    # closing step with the cotangent annulus: no new finite class, one more
    # quotient component (flag of the first leaf), and the cyclic condition
    new_h0 = h0 if crossing_ok else 0
    a0 = ExactSequenceInstance((0, new_h0, h0, h0 - new_h0), ("0", "H0(T2)", "H0(U_N)", "rank"))
    a1 = ExactSequenceInstance((0, finite, finite, 0), ("0", "H1 finite(T2)", "H1 finite(U_N)", "0"))
    h0 = new_h0
    comps = [flags[0]] + comps
    trace.append({"step": N, "glued": f"T2 = U_{N} + V_{N + 1}", "h0": h0, "finite_part": finite,
                  "infinite_components": len(comps), "quotient_flags": list(comps),
                  "audits": [a0, a1], "exact": check_exactness(a0) and check_exactness(a1)})

    extras = {"finite_part": finite, "infinite_components": len(comps), "quotient_flags": comps}
    summary = CohomologySummary({0: Dim.finite(h0), 1: Dim.symbolic(_h1_expression(comps, finite))}, 1,
                                extras=extras)
    return summary, trace


def model_from_json(data: dict) -> FoliationModel:
    mode = data.get("mode", "foliated")
    if data.get("variant") == "irrational":
        from .numberlab import SlopeNumber

        return FoliationModel("irrational", mode, eta=SlopeNumber.from_json(data["eta"]))
    leaves = []
    for i, d in enumerate(data["leaves"]):
        # without an explicit phase a non-BS leaf gets holonomy -1
        default = [1.0, 0.0] if d.get("bs", True) else [-1.0, 0.0]
        phase = complex(*d.get("phase", default))
        crossing = complex(*d.get("crossing", [1.0, 0.0]))
        leaf = LeafData.from_phase(float(d["lambda"]), phase, i + 1, crossing)
        if "bs" in d and bool(d["bs"]) != leaf.is_bs:
            raise ValueError(f"leaf {i + 1}: bs flag disagrees with its phase")
        leaves.append(leaf)
    return FoliationModel("generic", mode, leaves=tuple(leaves))
