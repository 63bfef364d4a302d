import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from gqkit import prequantum as pq
from gqkit.errors import NonMonotoneAction, OutOfDomain


def wavy(x, t):
    return x + 0.3 * math.sin(2 * math.pi * t) + 0.1 * x * math.cos(4 * math.pi * t)


WAVY = pq.ConnectionChart.from_function(wavy, (-1.5, 1.5))


def test_simpson_against_quad():
    f = lambda t: math.exp(math.sin(3 * t)) * math.cos(t)
    ref, _ = quad(f, 0.0, 2.0, epsabs=1e-13)
    assert abs(pq.adaptive_simpson(f, 0.0, 2.0, 1e-12) - ref) < 1e-11


def test_linear_action_example(frozen):
    chart = pq.ConnectionChart.linear(2, (0.0, 1.0))
    assert abs(chart.action(0.5) - frozen["linear_p2_action_x05"]) < 1e-12


@pytest.mark.parametrize("x", [-1.2, -0.3, 0.0, 0.7, 1.4])
def test_wavy_action_against_quad(x):
    ref, _ = quad(lambda t: wavy(x, t), 0.0, 1.0, epsabs=1e-13)
    assert abs(WAVY.action(x) - ref) < 1e-10


def test_transport_partial_arc_against_quad():
    x, a, b = 0.37, 0.1, 0.85
    ref, _ = quad(lambda t: wavy(x, t), a, b, epsabs=1e-13)
    val = pq.transport(WAVY, x, a, b, 1.0).value
    assert abs(val - cmath.exp(2j * math.pi * ref)) < 1e-9


def test_transport_is_unitary():
    v = pq.transport(WAVY, 0.2, 0.0, 0.6, 0.3 - 0.4j).value
    assert abs(abs(v) - 0.5) < 1e-12


def test_out_of_domain():
    with pytest.raises(OutOfDomain):
        pq.transport(WAVY, 3.0, 0, 1)
    with pytest.raises(OutOfDomain):
        pq.leaf_holonomy(WAVY, float("nan"))


def test_bs_scan_roots_linear(frozen):
    chart = pq.ConnectionChart.linear(2, (-0.75, 0.75))
    roots = [r for r, _ in pq.bs_scan(chart)]
    assert np.allclose(roots, frozen["bs_2x_roots"], atol=1e-9)


def test_bs_scan_boundary_flag():
    chart = pq.ConnectionChart.linear(1, (0.0, 2.0))
    res = pq.bs_scan(chart)
    assert [round(r, 9) for r, _ in res] == [0.0, 1.0, 2.0]
    assert [rep.boundary for _, rep in res] == [True, False, True]


def test_bs_scan_wavy_matches_integer_action():
    res = pq.bs_scan(WAVY, grid=129)
    assert len(res) == 3
    for x, rep in res:
        assert abs(WAVY.action(x) - round(WAVY.action(x))) < 1e-9
        assert rep.is_bs


def test_bs_scan_rejects_non_monotone():
    chart = pq.ConnectionChart.from_function(lambda x, t: x * x, (-1.0, 1.0))
    with pytest.raises(NonMonotoneAction):
        pq.bs_scan(chart)


def test_determinant_example(frozen):
    chart = pq.ConnectionChart.linear(1, (-1.5, 1.5))
    d = pq.bs_determinant(chart, 0.5)
    assert abs(d - complex(*frozen["det_linear_x05"])) < 1e-12


def test_grid_chart_full_loop(frozen):
    nx, nt = 16, 32
    xs = np.linspace(0, 1, nx)
    ts = np.arange(nt) / nt
    vals = xs[:, None] + 0.2 * np.sin(2 * np.pi * ts)[None, :]
    chart = pq.ConnectionChart.from_grid(vals, (0, 1))
    z = pq.transport(chart, 0.25, 0, 1).value
    assert abs(z - complex(*frozen["grid_loop_phase_x025"])) < 1e-9


def test_grid_chart_periodicity_check():
    vals = np.tile(np.linspace(0, 1, 8)[:, None], (1, 9))
    vals[:, -1] += 1e-3
    with pytest.raises(ValueError):
        pq.ConnectionChart.from_grid(vals, (0, 1), includes_endpoint=True)


def test_chart_json_roundtrip():
    chart = pq.ConnectionChart.torus(3)
    again = pq.chart_from_json(chart.to_json())
    assert again.area_p == 3 and abs(again.action(0.2) - chart.action(0.2)) < 1e-14


def test_two_chart_torus_matches_single_chart():
    tp = pq.TorusPrequantum(2)
    single = pq.ConnectionChart.torus(2)
    for x in (0.1, 0.3, 0.77):
        assert abs(tp.vertical_holonomy(x) - pq.leaf_holonomy(single, x).holonomy) < 1e-12


def test_torus_gluing_is_phase():
    tp = pq.TorusPrequantum(3)
    assert abs(tp.gluing_factor(1 / 3) - cmath.exp(2j * math.pi)) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.floats(-1.4, 1.4), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_cocycle_property(x, a, b, c):
    ab = pq.transport(WAVY, x, a, b).value
    bc = pq.transport(WAVY, x, b, c).value
    ac = pq.transport(WAVY, x, a, c).value
    assert abs(ab * bc - ac) < 2e-10


@settings(max_examples=40, deadline=None)
@given(st.floats(-1.45, 1.45))
def test_bs_equivalence_property(x):
    h = pq.leaf_holonomy(WAVY, x)
    d = pq.bs_determinant(WAVY, x)
    assert abs(abs(d) - abs(h.holonomy - 1)) < 1e-9
