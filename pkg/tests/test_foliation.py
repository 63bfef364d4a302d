import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gqkit import foliation as fo
from gqkit import numberlab as nl
from gqkit.errors import DegenerateTangency, OutOfDomain
from gqkit.quantize import Dim


def test_return_map_example(frozen):
    leaf = fo.LeafData.bs(math.log(2))
    assert abs(fo.return_map(leaf, 1.0) - frozen["return_map_ln2"]) < 1e-12
    assert abs(fo.iterate_return_map(leaf, 1.0, 3) - 0.125) < 1e-12
    with pytest.raises(OutOfDomain):
        fo.return_map(leaf, 2.0)


def test_leaf_validation():
    with pytest.raises(ValueError):
        fo.LeafData.bs(0.0)
    with pytest.raises(ValueError):
        fo.LeafData(1.0, True, -1.0)
    with pytest.raises(ValueError):
        fo.LeafData.from_phase(1.0, 2.0)


def test_annulus_quantize():
    assert fo.annulus_quantize(fo.LeafData.bs(1.0)).dims() == [1, 1]
    assert fo.annulus_quantize(fo.LeafData.from_phase(1.0, -1)).dims() == [0, 1]
    assert fo.cotangent_annulus_quantize(2).dims() == [0, 2]


@pytest.mark.parametrize("lam", [0.25, -1.0, 4.0])
def test_flat_limit_bs(lam):
    tr = fo.flat_limit_trace(fo.LeafData.bs(lam))
    assert tr.exists
    assert abs(tr.fitted_rate - abs(lam)) < 0.05 * abs(lam)
    n = np.arange(len(tr.gaps))
    assert np.all(tr.gaps <= tr.fitted_c * np.exp(-abs(lam) * n) * (1 + 1e-9))


def test_flat_limit_non_bs():
    leaf = fo.LeafData.from_phase(1.0, cmath.exp(0.1j))
    tr = fo.flat_limit_trace(leaf)
    assert not tr.exists and tr.gaps[-1] > 0.05


def test_torus_n3_example():
    leaves = tuple(fo.LeafData.from_phase(1.0, 1 if b else -1, i + 1) for i, b in enumerate((1, 0, 1)))
    model = fo.FoliationModel("generic", {"prequantum": 1}, leaves=leaves)
    summary, trace = fo.torus_cohomology(model)
    assert summary[0] == Dim.finite(0)
    assert summary.extras["finite_part"] == 3
    assert summary.extras["infinite_components"] == 3
    assert summary.extras["quotient_flags"] == [1, 0, 1]
    assert all(step["exact"] for step in trace)
    assert len(trace) == 4


def test_torus_all_bs_h0():
    leaves = tuple(fo.LeafData.bs(1.0, i + 1) for i in range(2))
    s, _ = fo.torus_cohomology(fo.FoliationModel("generic", {"prequantum": 1}, leaves=leaves))
    assert s[0] == Dim.finite(1)
    twisted = (fo.LeafData.bs(1.0, 1, crossing=-1), fo.LeafData.bs(1.0, 2))
    s, _ = fo.torus_cohomology(fo.FoliationModel("generic", {"prequantum": 1}, leaves=twisted))
    assert s[0] == Dim.finite(0)


def test_torus_foliated_flags_all_one():
    leaves = tuple(fo.LeafData.from_phase(1.0, -1, i + 1) for i in range(3))
    s, _ = fo.torus_cohomology(fo.FoliationModel("generic", "foliated", leaves=leaves))
    assert s.extras["quotient_flags"] == [1, 1, 1] and s[0] == Dim.finite(1)


def test_irrational_variant_delegates():
    model = fo.FoliationModel("irrational", "foliated", eta=nl.golden_ratio(30))
    s, trace = fo.torus_cohomology(model)
    assert s[1] == Dim.finite(1) and trace == []


def test_model_from_json():
    m = fo.model_from_json({"variant": "generic", "mode": {"prequantum": 1},
                            "leaves": [{"lambda": 1, "bs": True}, {"lambda": -2, "bs": False}]})
    assert m.n_leaves == 2 and [l.is_bs for l in m.leaves] == [True, False]
    with pytest.raises(ValueError):
        fo.model_from_json({"variant": "generic", "leaves": [{"lambda": 1, "bs": False, "phase": [1, 0]}]})


def test_tangency_sine(frozen):
    t = np.arange(400) / 400
    f = 0.1 * np.sin(2 * np.pi * t)
    rep = fo.tangency_count(t, f, lambda x, y: (1.0, 0.0))
    assert (rep.mu_plus, rep.mu_minus) == (1, 1)
    assert np.allclose(rep.locations, frozen["sine_tangencies"], atol=2e-3)


def test_tangency_refinement_stable():
    counts = []
    for n in (300, 600):
        t = np.arange(n) / n
        f = 0.2 * np.sin(4 * np.pi * t) + 0.05 * np.cos(2 * np.pi * t)
        rep = fo.tangency_count(t, f, lambda x, y: (1.0, 0.0))
        counts.append((rep.mu_plus, rep.mu_minus))
    assert counts[0] == counts[1]


def test_tangency_degenerate():
    t = np.arange(64) / 64
    with pytest.raises(DegenerateTangency):
        fo.tangency_count(t, np.zeros(64), lambda x, y: (1.0, 0.0))


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 5.0), st.floats(0.05, 6.2))
def test_flat_limit_exists_iff_bs(lam, angle):
    bs = fo.flat_limit_exists(fo.LeafData.bs(lam))
    non = fo.flat_limit_exists(fo.LeafData.from_phase(lam, cmath.exp(1j * angle)))
    assert bs and not non
