"""Dimension bookkeeping for quantization of fibrations.

Lattice counting of Bohr-Sommerfeld fibres, Kunneth products of dimension
vectors and Mayer-Vietoris gluing with an alternating-sum audit. Function
space terms never enter an exact sequence here: callers reduce them to
finite quotient data first.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import HypothesisViolated, RankInconsistent


# ---------------------------------------------------------------------------
# dimensions and summaries

@dataclass(frozen=True)
class Dim:
    """One cohomology degree: ``finite(d)``, ``infinite(witness)`` or ``symbolic(expr)``."""

    kind: str
    value: int | None = None
    witness: str | None = None
    expr: str | None = None

    def __post_init__(self):
        if self.kind not in ("finite", "infinite", "symbolic"):
            raise ValueError(f"unknown dimension kind {self.kind!r}")
        if self.kind == "finite" and (self.value is None or self.value < 0):
            raise ValueError("finite dimensions must be >= 0")

    @classmethod
    def finite(cls, d: int) -> "Dim":
        return cls("finite", int(d))

    @classmethod
    def infinite(cls, witness: str = "") -> "Dim":
        return cls("infinite", witness=witness)

    @classmethod
    def symbolic(cls, expr: str) -> "Dim":
        return cls("symbolic", expr=expr)

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    def to_json(self) -> dict:
        if self.kind == "finite":
            return {"finite": self.value}
        if self.kind == "infinite":
            return {"infinite": self.witness or True}
        return {"symbolic": self.expr}

    @classmethod
    def from_json(cls, data: dict) -> "Dim":
        if "finite" in data:
            return cls.finite(data["finite"])
        if "infinite" in data:
            w = data["infinite"]
            return cls.infinite(w if isinstance(w, str) else "")
        return cls.symbolic(data["symbolic"])

    def __str__(self):
        if self.kind == "finite":
            return "0" if self.value == 0 else ("C" if self.value == 1 else f"C^{self.value}")
        if self.kind == "infinite":
            return "infinite"
        return self.expr


@dataclass(frozen=True)
class CohomologySummary:
    degrees: dict
    top_degree: int
    tag: str = ""
    extras: dict = field(default_factory=dict)
    trace: tuple = ()

    def __post_init__(self):
        for deg, d in self.degrees.items():
            if not isinstance(d, Dim):
                raise TypeError("degrees must map to Dim")
            if not 0 <= deg <= self.top_degree:
                raise ValueError(f"degree {deg} outside 0..{self.top_degree}")
        if self.tag == "sniatycki":
            for deg in range(self.top_degree):
                if self[deg] != Dim.finite(0):
                    raise ValueError("a Sniatycki summary vanishes below the top degree")

    def __getitem__(self, deg: int) -> Dim:
        return self.degrees.get(deg, Dim.finite(0))

    @classmethod
    def from_dims(cls, dims, tag: str = "", **kw) -> "CohomologySummary":
        return cls({i: Dim.finite(d) for i, d in enumerate(dims)}, len(dims) - 1, tag, **kw)

    @classmethod
    def point(cls) -> "CohomologySummary":
        return cls.from_dims([1])

    @property
    def all_finite(self) -> bool:
        return all(self[i].is_finite for i in range(self.top_degree + 1))

    def dims(self) -> list[int]:
        if not self.all_finite:
            raise HypothesisViolated("summary has non-finite degrees", where="quantize.CohomologySummary.dims")
        return [self[i].value for i in range(self.top_degree + 1)]

    def total(self) -> Dim:
        """Total quantization: the direct sum over all degrees."""
        if self.all_finite:
            return Dim.finite(sum(self.dims()))
        kinds = [self[i] for i in range(self.top_degree + 1)]
        inf = [d for d in kinds if d.kind == "infinite"]
        if inf:
            return inf[0]
        return Dim.symbolic(" + ".join(str(d) for d in kinds if d != Dim.finite(0)))

    def to_json(self) -> dict:
        out = {"degrees": {str(i): self[i].to_json() for i in range(self.top_degree + 1)}}
        out.update(self.extras)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "CohomologySummary":
        degs = {int(k): Dim.from_json(v) for k, v in data["degrees"].items()}
        extras = {k: v for k, v in data.items() if k != "degrees"}
        return cls(degs, max(degs), extras=extras)

    def __str__(self):
        return "(" + ", ".join(str(self[i]) for i in range(self.top_degree + 1)) + ")"


# ---------------------------------------------------------------------------
# lattice counting

@dataclass(frozen=True)
class Interval:
    lo: Fraction | float
    hi: Fraction | float
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("interval endpoints must be finite")
        empty = self.lo > self.hi or (self.lo == self.hi and (self.lo_open or self.hi_open))
        if empty:
            raise ValueError(f"empty interval {self}")

    def integers(self) -> range:
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        first = math.floor(lo) + 1 if self.lo_open else math.ceil(lo)
        last = math.ceil(hi) - 1 if self.hi_open else math.floor(hi)
        return range(first, max(first, last + 1))

    def count(self) -> int:
        return len(self.integers())

    def to_json(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "lo_open": self.lo_open, "hi_open": self.hi_open}


@dataclass(frozen=True)
class ActionBox:
    """Product of intervals: the image of the action coordinates."""

    intervals: tuple[Interval, ...]

    def __post_init__(self):
        if not self.intervals:
            raise ValueError("an action box needs at least one interval")

    @property
    def n(self) -> int:
        return len(self.intervals)

    @classmethod
    def from_json(cls, data: dict) -> "ActionBox":
        return cls(tuple(Interval(float(d["lo"]), float(d["hi"]), bool(d.get("lo_open", False)),
                                  bool(d.get("hi_open", False))) for d in data["intervals"]))

    def to_json(self) -> dict:
        return {"intervals": [iv.to_json() for iv in self.intervals]}

    def lattice_points(self):
        return itertools.product(*(iv.integers() for iv in self.intervals))


def count_bs_fibers(box: ActionBox) -> int:
    return math.prod(iv.count() for iv in box.intervals)


def sniatycki_quantize(n: int, k: int) -> CohomologySummary:
    """Quantization of an ``n``-dimensional fibration with ``k`` BS fibres:
    everything sits in degree ``n``."""
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    degs = {i: Dim.finite(0) for i in range(n)}
    degs[n] = Dim.finite(k)
    return CohomologySummary(degs, n, "sniatycki")


# ---------------------------------------------------------------------------
# Kunneth

def convolve(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for p, x in enumerate(a):
        if x:
            for q, y in enumerate(b):
                out[p + q] += x * y
    return out


def kunneth_combine(a: CohomologySummary, b: CohomologySummary) -> CohomologySummary:
    """Cohomology of a product. The first factor must be all-finite; a
    non-finite degree of the second factor propagates to the degrees it
    reaches."""
    if not a.all_finite:
        raise HypothesisViolated("first Kunneth factor has a non-finite degree",
                                 where="quantize.kunneth_combine")
    da = a.dims()
    top = a.top_degree + b.top_degree
    if b.all_finite:
        return CohomologySummary.from_dims(convolve(da, b.dims()))
    degs = {}
    for n in range(top + 1):
        finite, other = 0, []
        for p, x in enumerate(da):
            q = n - p
            if x == 0 or not 0 <= q <= b.top_degree:
                continue
            d = b[q]
            if d.is_finite:
                finite += x * d.value
            else:
                other.append(d)
        if not other:
            degs[n] = Dim.finite(finite)
        elif any(d.kind == "infinite" for d in other):
            w = next(d.witness for d in other if d.kind == "infinite")
            degs[n] = Dim.infinite(w)
        else:
            parts = [d.expr for d in other] + ([f"C^{finite}"] if finite else [])
            degs[n] = Dim.symbolic(" + ".join(parts))
    return CohomologySummary(degs, top)


# ---------------------------------------------------------------------------
# exact sequences and Mayer-Vietoris

@dataclass(frozen=True)
class ExactSequenceInstance:
    terms: tuple[int, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        for t in self.terms:
            if not isinstance(t, int) or t < 0:
                raise ValueError("exact-sequence terms must be finite nonnegative integers")
        if self.labels and len(self.labels) != len(self.terms):
            raise ValueError("one label per term")

    def alternating_sum(self) -> int:
        return sum((-1) ** i * t for i, t in enumerate(self.terms))

    def to_json(self) -> dict:
        return {"terms": list(self.terms), "labels": list(self.labels),
                "exact": check_exactness(self)}


def check_exactness(seq: ExactSequenceInstance) -> bool:
    """Necessary condition for exactness: the alternating sum vanishes."""
    return seq.alternating_sum() == 0


def mv_sequence(u: CohomologySummary, v: CohomologySummary, w: CohomologySummary,
                ranks) -> tuple[list[int], ExactSequenceInstance]:
    """Glued dimensions and the long exact sequence that certifies them.

    ``ranks[i]`` is the rank of the restriction difference
    ``H^i(U) + H^i(V) -> H^i(U cap V)``. Then
    ``H^i(M) = ker(rank_i) + coker(rank_{i-1})``.
    """
    top = max(u.top_degree, v.top_degree, w.top_degree)
    try:
        du = u.dims() + [0] * (top - u.top_degree)
        dv = v.dims() + [0] * (top - v.top_degree)
        dw = w.dims() + [0] * (top - w.top_degree)
    except HypothesisViolated as exc:
        raise HypothesisViolated("reduce function-space terms before gluing",
                                 where="quantize.mv_assemble") from exc
    ranks = list(ranks) + [0] * (top + 1 - len(ranks))
    if len(ranks) != top + 1:
        raise RankInconsistent("more ranks than degrees", where="quantize.mv_assemble")
    h = []
    terms, labels = [0], ["0"]
    for i in range(top + 1):
        r = ranks[i]
        src = du[i] + dv[i]
        if not 0 <= r <= min(src, dw[i]):
            raise RankInconsistent(f"rank {r} impossible in degree {i} (source {src}, target {dw[i]})",
                                   where="quantize.mv_assemble")
        coker_prev = dw[i - 1] - ranks[i - 1] if i else 0
        h.append(src - r + coker_prev)
        terms += [h[-1], src, dw[i]]
        labels += [f"H{i}(M)", f"H{i}(U)+H{i}(V)", f"H{i}(UV)"]
    if dw[top] - ranks[top] != 0:
        raise RankInconsistent(f"cokernel in top degree {top} would force H^{top + 1} != 0",
                               where="quantize.mv_assemble")
    terms.append(0)
    labels.append("0")
    return h, ExactSequenceInstance(tuple(terms), tuple(labels))


def mv_assemble(u: CohomologySummary, v: CohomologySummary, w: CohomologySummary,
                ranks) -> CohomologySummary:
    h, seq = mv_sequence(u, v, w, ranks)
    if not check_exactness(seq):
        raise RankInconsistent("assembled sequence fails the exactness audit", where="quantize.mv_assemble")
    return CohomologySummary.from_dims(h, trace=(seq,))


def sniatycki_by_gluing(k: int) -> CohomologySummary:
    """Rebuild ``(0, C^k)`` for a circle fibration over an interval by gluing
    ``k`` strips, each holding one BS fibre, along BS-free overlaps."""
    if k < 0:
        raise ValueError("k must be >= 0")
    strip = CohomologySummary.from_dims([0, 1])
    overlap = CohomologySummary.from_dims([0, 0])
    acc = CohomologySummary.from_dims([0, 0])
    steps = []
    for _ in range(k):
        acc = mv_assemble(acc, strip, overlap, [0, 0])
        steps.extend(acc.trace)
    return CohomologySummary(dict(acc.degrees), 1, "sniatycki", trace=tuple(steps))


def strip_sequence(k: int) -> ExactSequenceInstance:
    """Reduced sequence of a vertical-circle strip with ``k`` BS leaves:
    flat sections on the two charts and on the overlap are all ``C^inf`` of
    the transverse coordinate, and the gluing map drops rank at each BS leaf,
    leaving a cokernel of dimension ``k``."""
    return ExactSequenceInstance((0, 0, k, k), ("H0", "ker quotient", "coker", "H1"))


def strip_quantize(chart, grid: int = 257, include_boundary: bool = False) -> CohomologySummary:
    """Quantization of an annulus chart with the vertical polarization, from
    its Bohr-Sommerfeld leaves. Leaves on the chart boundary lie outside the
    open strip unless ``include_boundary``."""
    from .prequantum import bs_scan

    roots = bs_scan(chart, grid)
    k = sum(1 for _, rep in roots if include_boundary or not rep.boundary)
    seq = strip_sequence(k)
    if not check_exactness(seq):
        raise RankInconsistent("strip sequence fails the audit", where="quantize.strip_quantize")
    base = sniatycki_quantize(1, k)
    return CohomologySummary(dict(base.degrees), 1, "sniatycki",
                             extras={"bs_leaves": [x for x, rep in roots if include_boundary or not rep.boundary]},
                             trace=(seq,))
