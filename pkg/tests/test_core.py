import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from vertex_amplitudes import (
    ComplexMat2,
    EdgeSpec,
    NegativeEnergy,
    SingularMatrix,
    SquareBarrier,
    SquareWell,
    Tabulated,
    TwoTerminalGraph,
    ev_to_k,
    k_to_ev,
    mat2_inv,
    mat2_mul,
)
from vertex_amplitudes.core import csqrt

finite = st.floats(-10, 10, allow_nan=False)
cplx = st.builds(complex, finite, finite)
mats = st.builds(ComplexMat2, cplx, cplx, cplx, cplx)


def close(a: ComplexMat2, b: ComplexMat2, tol):
    return np.allclose(a.as_array(), b.as_array(), rtol=0, atol=tol)


def test_units_round_trip():
    assert k_to_ev(ev_to_k(0.25)) == pytest.approx(0.25, rel=1e-15)
    assert ev_to_k(0.0380998) == pytest.approx(1.0, rel=1e-15)


def test_negative_energy_rejected():
    with pytest.raises(NegativeEnergy):
        ev_to_k(-0.1)
    with pytest.raises(ValueError):
        ev_to_k(0.0)


@given(cplx)
def test_csqrt_branch(z):
    w = csqrt(z)
    assert w.imag >= 0
    assert abs(w * w - z) <= 1e-12 * max(1.0, abs(z))


def test_csqrt_below_threshold_is_decaying():
    assert csqrt(-4.0) == 2j


@given(mats, mats, mats)
def test_matmul_associative(a, b, c):
    lhs = mat2_mul(mat2_mul(a, b), c)
    rhs = mat2_mul(a, mat2_mul(b, c))
    assert close(lhs, rhs, 1e-12 * max(1.0, a.norm() * b.norm() * c.norm()))


@given(mats)
def test_inverse(a):
    assume(abs(a.det()) > 1e-3)
    eye = mat2_mul(a, mat2_inv(a))
    assert close(eye, ComplexMat2.identity(), 1e-8 * a.norm() ** 2 / abs(a.det()))


@given(mats, mats)
def test_det_multiplicative(a, b):
    d = mat2_mul(a, b).det()
    assert abs(d - a.det() * b.det()) <= 1e-9 * max(1.0, a.norm() ** 2 * b.norm() ** 2)


def test_singular_inverse_raises():
    with pytest.raises(SingularMatrix):
        mat2_inv(ComplexMat2(1, 2, 2, 4))


def test_nonfinite_entries_rejected():
    with pytest.raises(ValueError):
        ComplexMat2(float("nan"), 0, 0, 1)


def test_potential_validation():
    with pytest.raises(ValueError):
        SquareWell(0.5, 1.0)
    with pytest.raises(ValueError):
        SquareBarrier(-0.1, 1.0)
    with pytest.raises(ValueError):
        Tabulated(np.array([0.0, 1.0, 1.5]), np.zeros(3))
    with pytest.raises(ValueError):
        Tabulated(np.array([1.0, 0.0]), np.zeros(2))


def test_edge_validation():
    with pytest.raises(ValueError):
        EdgeSpec(0.0)
    with pytest.raises(ValueError):
        EdgeSpec(1.0, SquareWell(-0.5, 2.0))
    with pytest.raises(ValueError):
        EdgeSpec(1.0, ab_sign=2)
    tab = Tabulated(np.linspace(0, 1, 11), np.zeros(11))
    with pytest.raises(ValueError):
        EdgeSpec(1.0, tab)  # tabulated support must sit strictly inside
    assert EdgeSpec(2.0, tab).support_start == pytest.approx(0.5)


def test_graph_builders():
    ring = TwoTerminalGraph.ring(1.0, 2.0, alpha=0.3)
    assert [e.ab_sign for e in ring.edges] == [1, -1]
    assert TwoTerminalGraph.ring(1.0, 2.0).edges[0].ab_sign == 0
    wells = TwoTerminalGraph.parallel_wells(3, -0.5, 1.0)
    assert len(wells.edges) == 3 and wells.edges[0].support_start == 0.0
    with pytest.raises(ValueError):
        TwoTerminalGraph((EdgeSpec(1.0, ab_sign=1),), flux_alpha=1.0)
    with pytest.raises(ValueError):
        TwoTerminalGraph((EdgeSpec(1.0), EdgeSpec(2.0)), flux_alpha=1.0)
    with pytest.raises(ValueError):
        TwoTerminalGraph.parallel_wells(0, -0.5, 1.0)


def test_tabulated_from_file(tmp_path):
    p = tmp_path / "v.dat"
    p.write_text("# xi V\n0.0 -0.1\n0.5 -0.2\n1.0 -0.1\n")
    tab = Tabulated.from_file(p)
    assert tab.width == 1.0
    assert tab.value_ev(0.25) == pytest.approx(-0.15)
    assert tab.value_ev(2.0) == 0.0
    assert math.isclose(float(tab.value_ev(-1.0)), 0.0)
