import cmath

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import square_well_textbook
from vertex_amplitudes import (
    ComplexMat2,
    CompositeRing,
    MixedWaveNumber,
    RingSpec,
    SquareBarrier,
    SquareWell,
    Tabulated,
    TransferMatrix,
    ZeroTransmission,
    cascade,
    m_compose,
    m_free_segment,
    m_from_amplitudes,
    m_square_well,
    ring_transfer_matrix,
)
from vertex_amplitudes.transfer import m_potential

ks = st.floats(0.2, 9.0)
depths = st.floats(-3.0, -0.05)
widths = st.floats(0.2, 2.0)


@given(ks, depths, widths)
def test_square_well_matches_textbook(k, depth, width):
    t, r = square_well_textbook(depth, width, k)
    m = m_square_well(depth, width, k)
    assert abs(m.t - t) < 1e-10
    assert abs(m.r - r) < 1e-10


@given(ks, depths, widths)
def test_square_well_is_lossless_and_unimodular(k, depth, width):
    m = m_square_well(depth, width, k)
    assert m.flux_defect() < 1e-9
    assert abs(m.m.det() - 1) < 1e-9
    assert abs(abs(m.t) ** 2 + abs(m.r) ** 2 - 1) < 1e-10


@given(st.floats(0.2, 3.0), st.floats(0.05, 2.0), widths)
def test_barrier_tunnelling_is_unitary(k, height, width):
    m = m_potential(SquareBarrier(height, width), k)
    assert abs(abs(m.t) ** 2 + abs(m.r) ** 2 - 1) < 1e-9


@given(ks, depths, widths)
def test_amplitudes_round_trip(k, depth, width):
    m = m_square_well(depth, width, k)
    back = m_from_amplitudes(m.t, m.r, k)
    assert np.allclose(back.m.as_array(), m.m.as_array(), atol=1e-9 * m.m.norm())


@given(ks, depths, depths, widths, st.floats(0.0, 3.0))
def test_compose_is_lossless(k, d1, d2, width, gap):
    tm = cascade([m_square_well(d1, width, k), m_square_well(d2, width, k)], [gap])
    assert abs(abs(tm.t) ** 2 + abs(tm.r) ** 2 - 1) < 1e-9
    assert abs(tm.m.det() - 1) < 1e-9


@given(ks, depths, widths, st.floats(0.0, 2.0))
def test_cascade_inserts_free_segments(k, depth, width, gap):
    a = m_square_well(depth, width, k)
    b = m_square_well(depth / 2, width, k)
    explicit = m_compose([a, m_free_segment(gap, k), b])
    assert np.allclose(cascade([a, b], [gap]).m.as_array(), explicit.m.as_array(), atol=1e-12)


def test_offset_equals_free_segments_around_the_well():
    k, d, w, x = 1.7, -0.4, 0.8, 0.6
    shifted = m_potential(SquareWell(d, w), k, at=x)
    back = TransferMatrix(ComplexMat2.diag(cmath.exp(1j * k * x), cmath.exp(-1j * k * x)), k)
    chain = m_compose([m_free_segment(x, k), m_square_well(d, w, k), back])
    assert np.allclose(shifted.m.as_array(), chain.m.as_array(), atol=1e-12)


def test_zero_transmission_rejected():
    with pytest.raises(ZeroTransmission):
        m_from_amplitudes(0.0, -1.0, 1.0)


def test_mixed_wave_numbers_rejected():
    with pytest.raises(MixedWaveNumber):
        m_compose([m_square_well(-0.5, 1.0, 1.0), m_square_well(-0.5, 1.0, 1.1)])
    with pytest.raises(MixedWaveNumber):
        m_potential(CompositeRing(1.0, 0.5, 0.5j), 1.2)


def test_link_count_checked():
    with pytest.raises(ValueError):
        cascade([m_square_well(-0.5, 1.0, 1.0)] * 3, [0.1])


def test_tabulated_constant_matches_square_well():
    tab = Tabulated(np.linspace(0.0, 1.0, 101), np.full(101, -0.5))
    for k in (0.5, 2.0, 6.0):
        assert abs(m_potential(tab, k).t - m_square_well(-0.5, 1.0, k).t) < 1e-9


def test_flux_ring_needs_both_incidence_sides():
    spec = RingSpec(1.0, 2.1, 0.7)
    k = 2.3
    tm = ring_transfer_matrix(spec, k)
    # a time-reversal-even matrix would give |t'| = |t| but t' != t in phase
    right = m_from_amplitudes(tm.t, tm.r, k)
    assert abs(right.m.m22 - tm.m.m22) > 1e-3
    assert abs(abs(tm.t) ** 2 + abs(tm.r) ** 2 - 1) < 1e-12
