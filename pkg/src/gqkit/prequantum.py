"""Prequantum connections on annulus charts and Bohr-Sommerfeld detection.

A chart is ``(x_min, x_max) x S^1`` with ``theta`` in ``[0, 1)``. In the
trivializing frame the connection reads ``d - 2*pi*i*sigma*h(x, theta) dtheta``
where ``sigma = +1`` is the default orientation. The sign is stored on the
chart so that frames written as ``d + 2*pi*i*h dtheta`` are entered with
``orientation=-1`` instead of negating ``h`` by hand.

Flat sections along the vertical circle through ``x`` are

    f(theta1) = f(theta0) * exp(2*pi*i*sigma * int_{theta0}^{theta1} h(x, s) ds)

and a leaf is Bohr-Sommerfeld when the full-loop factor is 1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import NonMonotoneAction, OutOfDomain, QuadratureFailure

QUAD_TOL = 1e-10
HOLONOMY_TOL = 1e-8
ROOT_TOL = 1e-9
ANCHOR_THETA = 0.5
TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# quadrature

def adaptive_simpson(f: Callable[[float], float], a: float, b: float, tol: float = QUAD_TOL,
                     max_depth: int = 48, min_depth: int = 3) -> float:
    """Adaptive Simpson rule with Richardson correction and absolute tolerance.

    ``min_depth`` forces a few uniform splits so that periodic integrands
    sampled only at symmetric points are not accepted by accident.
    """
    if a == b:
        return 0.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0
    total = 0.0
    # explicit stack: (a, b, fa, fm, fb, whole, tol, depth)
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, est, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = (mid - lo) * (flo + 4.0 * flm + fmid) / 6.0
        right = (hi - mid) * (fmid + 4.0 * frm + fhi) / 6.0
        delta = left + right - est
        if depth >= min_depth and abs(delta) <= 15.0 * eps:
            total += left + right + delta / 15.0
            continue
        if depth >= max_depth:
            raise QuadratureFailure(f"no convergence on [{lo}, {hi}]", where="prequantum.transport")
        stack.append((lo, mid, flo, flm, fmid, left, 0.5 * eps, depth + 1))
        stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * eps, depth + 1))
    if not math.isfinite(total):
        raise QuadratureFailure("non-finite integral", where="prequantum.transport")
    return total


# ---------------------------------------------------------------------------
# charts

@dataclass(frozen=True)
class ConnectionChart:
    """Connection potential ``h(x, theta)`` on ``(x_min, x_max) x S^1``."""

    domain: tuple[float, float]
    potential: Callable[[float, float], float]
    area_p: int = 0
    orientation: int = 1
    anchor_theta: float = ANCHOR_THETA
    preset: str = "custom"
    params: dict = field(default_factory=dict)
    symplectic: bool = True
    # leaf(x) -> callable of theta; set for grid charts to avoid re-interpolating
    leaf_factory: Callable[[float], Callable[[float], float]] | None = None

    def __post_init__(self):
        lo, hi = self.domain
        if not lo < hi:
            raise ValueError("empty chart domain")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        if self.area_p < 0:
            raise ValueError("area class must be nonnegative")

    # constructors -----------------------------------------------------------

    @classmethod
    def linear(cls, c: float = 1.0, domain=(-1.5, 1.5), area_p: int | None = None) -> "ConnectionChart":
        """``h = c*x``: the potential of ``c dx^dtheta``."""
        c = float(c)
        if area_p is None:
            area_p = max(0, round(c)) if float(c).is_integer() else 0
        return cls(tuple(map(float, domain)), lambda x, t: c * x, int(area_p),
                   preset="linear", params={"c": c}, symplectic=c > 0)

    @classmethod
    def torus(cls, p: int, domain=(0.0, 1.0)) -> "ConnectionChart":
        """The torus connection ``d + 2*pi*i*p*theta dx`` after the gauge change
        ``exp(-2*pi*i*p*x*theta)``, which turns it into ``d - 2*pi*i*p*x dtheta``
        on the cut torus. Vertical holonomy is ``exp(2*pi*i*p*x)``."""
        p = int(p)
        if p < 1:
            raise ValueError("area class p must be >= 1")
        return cls(tuple(map(float, domain)), lambda x, t: p * x, p,
                   preset="torus", params={"p": p}, symplectic=True)

    @classmethod
    def from_function(cls, h, domain, area_p: int = 0, orientation: int = 1, **kw) -> "ConnectionChart":
        return cls(tuple(map(float, domain)), h, area_p, orientation, **kw)

    @classmethod
    def from_grid(cls, values, domain, area_p: int = 0, orientation: int = 1,
                  periodic_tol: float = 1e-12, includes_endpoint: bool = False) -> "ConnectionChart":
        """Grid-sampled potential, ``values[i, j] = h(x_i, theta_j)``.

        ``x_i`` spans the domain uniformly (endpoints included) and
        ``theta_j = j/ntheta``. With ``includes_endpoint`` the last column is
        ``theta = 1`` and must repeat the first one within ``periodic_tol``.
        Interpolation is a tensor cubic spline: not-a-knot in ``x``,
        periodic in ``theta``.
        """
        vals = np.asarray(values, dtype=float)
        if vals.ndim != 2 or vals.shape[0] < 4 or vals.shape[1] < 4:
            raise ValueError("grid needs at least 4 x 4 samples")
        if includes_endpoint:
            gap = float(np.max(np.abs(vals[:, -1] - vals[:, 0])))
            if gap > periodic_tol:
                raise ValueError(f"grid not periodic in theta (gap {gap:.3g})")
            vals = vals[:, :-1]
        nx, nt = vals.shape
        lo, hi = map(float, domain)
        xs = np.linspace(lo, hi, nx)
        ts = np.arange(nt + 1) / nt
        closed = np.concatenate([vals, vals[:, :1]], axis=1)
        in_x = CubicSpline(xs, closed, axis=0)

        def leaf(x):
            col = in_x(x)
            col[-1] = col[0]
            return CubicSpline(ts, col, bc_type="periodic", extrapolate="periodic")

        def h(x, t):
            return float(leaf(x)(t))

        dh = in_x.derivative()
        symplectic = bool(np.all(dh(xs) > 0))
        return cls((lo, hi), h, area_p, orientation, preset="grid",
                   params={"nx": nx, "ntheta": nt, "values": vals.tolist()},
                   symplectic=symplectic, leaf_factory=lambda x: (lambda t, s=leaf(x): float(s(t))))

    # evaluation ---------------------------------------------------------------

    def contains(self, x: float) -> bool:
        lo, hi = self.domain
        return lo <= x <= hi

    def leaf(self, x: float) -> Callable[[float], float]:
        if self.leaf_factory is not None:
            return self.leaf_factory(x)
        h = self.potential
        return lambda t: h(x, t)

    def _check(self, x: float, where: str) -> None:
        if not (math.isfinite(x) and self.contains(x)):
            raise OutOfDomain(f"x={x} outside chart domain {self.domain}", where=where)

    def action(self, x: float, tol: float = QUAD_TOL) -> float:
        """``int_0^1 h(x, s) ds``."""
        self._check(x, "prequantum.action")
        return adaptive_simpson(self.leaf(x), 0.0, 1.0, tol)

    def to_json(self) -> dict:
        out = {"preset": self.preset}
        if self.preset == "grid":
            out = {"grid": dict(self.params)}
        else:
            out.update(self.params)
        out["domain"] = list(self.domain)
        out["area_p"] = self.area_p
        if self.orientation != 1:
            out["orientation"] = self.orientation
        return out


def chart_from_json(data: dict) -> ConnectionChart:
    domain = data.get("domain", [-1.5, 1.5])
    orientation = int(data.get("orientation", 1))
    if "grid" in data:
        g = data["grid"]
        vals = np.asarray(g["values"], dtype=float)
        if "nx" in g and "ntheta" in g:
            vals = vals.reshape(int(g["nx"]), -1)
        return ConnectionChart.from_grid(vals, domain, int(data.get("area_p", 0)), orientation,
                                         includes_endpoint=bool(g.get("includes_endpoint", False)))
    preset = data.get("preset", "linear")
    if preset == "linear":
        chart = ConnectionChart.linear(float(data.get("c", 1.0)), domain, data.get("area_p"))
    elif preset == "torus":
        chart = ConnectionChart.torus(int(data["p"]), domain)
    else:
        raise ValueError(f"unknown preset {preset!r}")
    if orientation != 1:
        chart = ConnectionChart(chart.domain, chart.potential, chart.area_p, orientation,
                                chart.anchor_theta, chart.preset, chart.params, chart.symplectic)
    return chart


# ---------------------------------------------------------------------------
# transport and holonomy

@dataclass(frozen=True)
class FlatSectionValue:
    base: tuple[float, float]
    value: complex

    def to_json(self) -> dict:
        return {"base": list(self.base), "value": [self.value.real, self.value.imag]}


@dataclass(frozen=True)
class HolonomyReport:
    x: float
    holonomy: complex
    action: float
    is_bs: bool
    tol: float
    boundary: bool = False

    def to_json(self) -> dict:
        out = {"x": self.x, "action": self.action,
               "holonomy": [self.holonomy.real, self.holonomy.imag], "is_bs": self.is_bs}
        if self.boundary:
            out["boundary"] = True
        return out


def _phase_factor(chart: ConnectionChart, x: float, t0: float, t1: float, tol: float) -> complex:
    # the phase is 2*pi*integral, so the integral needs tol/(2*pi)
    integral = adaptive_simpson(chart.leaf(x), t0, t1, tol / TWO_PI)
    return cmath.exp(1j * TWO_PI * chart.orientation * integral)


def transport(chart: ConnectionChart, x: float, theta0: float, theta1: float,
              initial: complex = 1.0, tol: float = QUAD_TOL) -> FlatSectionValue:
    """Parallel transport of ``initial`` from ``theta0`` to ``theta1`` along the
    vertical circle through ``x`` (lifts in the universal cover)."""
    chart._check(x, "prequantum.transport")
    value = complex(initial) * _phase_factor(chart, x, float(theta0), float(theta1), tol)
    return FlatSectionValue((float(x), float(theta1)), value)


def leaf_holonomy(chart: ConnectionChart, x: float, tol: float = HOLONOMY_TOL,
                  quad_tol: float = QUAD_TOL) -> HolonomyReport:
    chart._check(x, "prequantum.leaf_holonomy")
    integral = adaptive_simpson(chart.leaf(x), 0.0, 1.0, quad_tol / TWO_PI)
    hol = cmath.exp(1j * TWO_PI * chart.orientation * integral)
    return HolonomyReport(float(x), hol, integral, abs(hol - 1.0) <= tol, tol)


def bs_determinant(chart: ConnectionChart, x: float, tol: float = QUAD_TOL) -> complex:
    """``det [[1, -1], [E0, -E1]]`` with ``E_j`` the transport from the anchor
    fibre to ``theta = j``. Vanishes exactly on Bohr-Sommerfeld leaves."""
    chart._check(x, "prequantum.bs_determinant")
    a = chart.anchor_theta
    e0 = _phase_factor(chart, x, a, 0.0, tol)
    e1 = _phase_factor(chart, x, a, 1.0, tol)
    return e0 - e1


def _dist_to_int(a: float) -> float:
    return abs(a - round(a))


def bs_scan(chart: ConnectionChart, grid: int = 257, tol: float = ROOT_TOL,
            holonomy_tol: float = HOLONOMY_TOL) -> list[tuple[float, HolonomyReport]]:
    """All ``x`` in the closed domain where the action is an integer.

    The action is sampled on ``grid`` points; it must increase strictly.
    Each integer crossing is bracketed, bisected to ``tol`` in ``x`` and
    polished with secant steps. Roots at the domain ends carry
    ``boundary=True``.
    """
    if grid < 2:
        raise ValueError("grid must be >= 2")
    lo, hi = chart.domain
    xs = np.linspace(lo, hi, int(grid))
    acts = np.array([chart.action(float(x)) for x in xs])
    steps = np.diff(acts)
    if np.any(steps <= 0):
        i = int(np.argmax(steps <= 0))
        raise NonMonotoneAction(f"action not increasing between x={xs[i]:.6g} and x={xs[i+1]:.6g}",
                                where="prequantum.bs_scan")

    def g(x, n):
        return chart.action(x) - n

    out: list[tuple[float, HolonomyReport]] = []
    for n in range(math.ceil(acts[0] - 1e-12), math.floor(acts[-1] + 1e-12) + 1):
        j = int(np.searchsorted(acts, n))
        j = min(max(j, 1), len(xs) - 1)
        a, b = float(xs[j - 1]), float(xs[j])
        ga, gb = acts[j - 1] - n, acts[j] - n
        if abs(ga) <= 1e-15:
            root = a
        elif abs(gb) <= 1e-15:
            root = b
        else:
            while b - a > tol:
                m = 0.5 * (a + b)
                gm = g(m, n)
                if gm == 0:
                    a = b = m
                    break
                if (gm < 0) == (ga < 0):
                    a, ga = m, gm
                else:
                    b, gb = m, gm
            root = 0.5 * (a + b)
            # secant polish inside the final bracket
            x0, x1 = a, b
            g0, g1 = g(x0, n), g(x1, n)
            for _ in range(4):
                if g1 == g0:
                    break
                x2 = x1 - g1 * (x1 - x0) / (g1 - g0)
                if not (min(a, b) - tol <= x2 <= max(a, b) + tol):
                    break
                x0, g0, x1, g1 = x1, g1, x2, g(x2, n)
                root = x1
            root = min(max(root, lo), hi)
        rep = leaf_holonomy(chart, root, holonomy_tol)
        boundary = abs(root - lo) <= tol or abs(root - hi) <= tol
        out.append((root, HolonomyReport(rep.x, rep.holonomy, rep.action, rep.is_bs, rep.tol, boundary)))
    return out


def action_table(chart: ConnectionChart, grid: int = 257) -> list[tuple[float, float]]:
    """``(x, action)`` samples for plotting."""
    lo, hi = chart.domain
    return [(float(x), chart.action(float(x))) for x in np.linspace(lo, hi, int(grid))]


# ---------------------------------------------------------------------------
# torus with two charts

@dataclass(frozen=True)
class TorusPrequantum:
    """Prequantum torus of area class ``p`` covered by two vertical charts.

    ``U`` carries the frame transported upward from ``theta = 0`` and ``V``
    the frame transported downward from ``theta = 1``; at the seam
    ``sigma_U = sigma_V * exp(2*pi*i*p*x)``. The chart potentials are the
    residual ``dtheta`` parts of the connection in each frame (zero for the
    flat model).
    """

    p: int
    chart_u: ConnectionChart | None = None
    chart_v: ConnectionChart | None = None
    seam: float = 0.5

    def _chart(self, c):
        return c if c is not None else ConnectionChart((0.0, 1.0), lambda x, t: 0.0, self.p, preset="zero")

    def gluing_factor(self, x: float) -> complex:
        return cmath.exp(1j * TWO_PI * self.p * x)

    def vertical_holonomy(self, x: float, tol: float = QUAD_TOL) -> complex:
        """Transport around the vertical circle through ``x``: up through ``U``,
        across the seam, up through ``V``."""
        up = transport(self._chart(self.chart_u), x, 0.0, self.seam, 1.0, tol).value
        across = up * self.gluing_factor(x)
        return transport(self._chart(self.chart_v), x, self.seam, 1.0, across, tol).value

    def chart_holonomies(self, x: float, tol: float = QUAD_TOL) -> tuple[complex, complex]:
        hu = transport(self._chart(self.chart_u), x, 0.0, self.seam, 1.0, tol).value
        hv = transport(self._chart(self.chart_v), x, self.seam, 1.0, 1.0, tol).value
        return hu, hv
