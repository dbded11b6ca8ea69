import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from oracles import network_amplitudes, ring_network
from vertex_amplitudes import (
    NonConvergent,
    ResonanceKind,
    RingSpec,
    TwoTerminalGraph,
    ab_ftr_condition,
    assemble_gamma,
    cascade,
    edge_wavefunction,
    find_resonances,
    omega_beta,
    ring_amplitudes_asymmetric,
    ring_r_symmetric,
    ring_t_symmetric,
    ring_transfer_matrix,
    scatter,
    solve_vertex_amplitudes,
)
from vertex_amplitudes.models import (
    dip_fwhm,
    iterated_limit,
    richardson_limit,
    ring_amplitudes_offsets,
    ring_element,
)

ks = st.floats(0.15, 9.5)
lengths = st.floats(0.3, 3.0)


def numerator(l1, l2, k):
    return 1j * (math.sin(k * l2) + math.sin(k * l1))


def denominator(l1, l2, k):
    x, y = k * l1, k * l2
    return 1.5 * math.sin(x) * math.sin(y) + 1j * math.sin(x + y) - math.cos(x) * math.cos(y) + 1


@given(lengths, ks)
def test_symmetric_ring_forms(l, k):
    assume(abs(math.sin(k * l)) > 1e-3)
    t, r = ring_network(l, l, k)
    assert abs(ring_t_symmetric(l, k) - t) < 1e-12
    assert abs(ring_r_symmetric(l, k) - r) < 1e-12


@given(lengths, lengths, st.floats(-4, 4), ks)
def test_asymmetric_ring_form_matches_network(l1, l2, alpha, k):
    assume(min(abs(math.sin(k * l1)), abs(math.sin(k * l2))) > 1e-3)
    t, r = ring_network(l1, l2, k, alpha)
    res = ring_amplitudes_asymmetric(RingSpec(l1, l2, alpha), k)
    assert abs(res.t - t) < 1e-10 and abs(res.r - r) < 1e-10


@given(st.floats(-0.4, 0.4), st.floats(-0.4, 0.4), st.floats(-0.4, 0.4))
def test_offset_form_agrees_with_direct_form(dx, dy, da):
    l1, l2, a0 = 1.0, 2.1, 0.0
    k = 2.0
    spec = RingSpec(l1 * (1 + dx), l2 * (1 + dy), a0 + da)
    direct = ring_amplitudes_asymmetric(spec, k)
    off = ring_amplitudes_offsets(k * l1, k * l1 * dx, k * l2, k * l2 * dy,
                                  a0 * 3.1, da * spec.L, da * spec.l1)
    assert abs(direct.t - off.t) < 1e-9
    assert abs(direct.r - off.r) < 1e-9


@pytest.mark.parametrize("l1,l2", [(1.0, 1.1), (1.0, 2.1), (0.7, 1.9)])
@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_omega_beta_from_first_order_expansion(l1, l2, n):
    L = l1 + l2
    k0 = 2 * math.pi * n / L
    h = 1e-6
    dn = (numerator(l1, l2, k0 + h) - numerator(l1, l2, k0 - h)) / (2 * h)
    dd = (denominator(l1, l2, k0 + h) - denominator(l1, l2, k0 - h)) / (2 * h)
    omega, beta = omega_beta(RingSpec(l1, l2), n)
    assert abs(omega - denominator(l1, l2, k0) / dd) < 1e-7 * max(1.0, abs(omega))
    assert abs(beta - dn / dd) < 1e-7 * max(1.0, abs(beta))


def test_omega_vanishes_for_commensurate_arms():
    for n in range(1, 6):
        omega, _ = omega_beta(RingSpec(1.0, 2.0), 3 * n)
        assert abs(omega) < 1e-15


def test_resonance_table():
    spec = RingSpec(1.0, 2.1)
    reps = find_resonances(spec, 0.1, 10.0)
    ftr = [r for r in reps if r.kind is ResonanceKind.FTR]
    strs = [r for r in reps if r.kind is ResonanceKind.STR]
    assert [r.n_index for r in ftr] == list(range(1, 5))
    assert [r.n_index for r in strs] == [0, 1]
    for r in reps:
        assert abs(ring_amplitudes_asymmetric(spec, r.k_res).t) < 1e-10
        assert r.width > 0
    assert all(a.k_res <= b.k_res for a, b in zip(reps, reps[1:]))


def test_commensurate_ftr_is_removable():
    reps = find_resonances(RingSpec(1.0, 2.0), 1.0, 7.0)
    ftr = {r.n_index: r for r in reps if r.kind is ResonanceKind.FTR}
    assert ftr[3].removable and not ftr[1].removable and not ftr[2].removable
    assert not find_resonances(RingSpec(1.0, 1.1), 1.0, 3.0)[0].removable


def test_resonances_refuse_nontrivial_flux():
    with pytest.raises(ValueError):
        find_resonances(RingSpec(1.0, 2.1, 0.3), 0.1, 5.0)
    L = 3.1
    assert find_resonances(RingSpec(1.0, 2.1, 2 * math.pi / L), 0.1, 5.0)


def test_str_width_exceeds_narrow_ftr_widths():
    reps = find_resonances(RingSpec(1.0, 1.1), 0.1, 40.0)
    str_w = min(r.width for r in reps if r.kind is ResonanceKind.STR)
    ftr_w = max(r.width for r in reps if r.kind is ResonanceKind.FTR)
    assert str_w > 10 * ftr_w


def test_ab_ftr_condition():
    spec = RingSpec(1.0, 2.0, 2 * math.pi / 3.0)
    assert ab_ftr_condition(spec, 2 * math.pi / 3.0)
    assert not ab_ftr_condition(spec, 2 * math.pi / 3.0 + 1e-6)
    assert not ab_ftr_condition(RingSpec(1.0, 2.0, 1.0), 2 * math.pi / 3.0)


def test_dip_fwhm_of_lorentzian():
    gamma = 0.01
    T = lambda k: 1 - 1 / (1 + ((k - 2.0) / gamma) ** 2)
    # background at +-50 gamma sits 4e-4 below one, which shifts the level slightly
    assert dip_fwhm(T, 2.0, 50 * gamma) == pytest.approx(2 * gamma, rel=1e-3)


def test_richardson_removes_linear_term():
    hs = [10.0 ** -j for j in range(2, 7)]
    val, err = richardson_limit([3 + 2j + 5 * h + 7 * h * h for h in hs])
    # the quadratic term survives as 7 h_{j-1} h_j
    assert abs(val - (3 + 2j)) < 1e-10 and err < 1e-8


def test_iterated_limit_detects_nonconvergence():
    with pytest.raises(NonConvergent):
        iterated_limit(lambda h, e: math.sin(1 / h), lambda h: h)


def test_ring_element_and_transfer_matrix_agree():
    spec = RingSpec(1.0, 2.1, 0.4)
    k = 1.3
    el = ring_element(spec, k)
    res = scatter(spec.graph(), k)
    assert abs(el.t - res.t) < 1e-12 and abs(el.r - res.r) < 1e-12
    tm = ring_transfer_matrix(spec, k)
    assert abs(tm.t - res.t) < 1e-12


@pytest.mark.parametrize("alpha", [0.0, 0.45, -1.3])
def test_two_ring_chain_matches_network(alpha):
    spec = RingSpec(1.0, 2.1, alpha)
    edges = []
    for i in range(2):
        edges += [(i, i + 1, 1.0, 1), (i, i + 1, 2.1, -1)]
    for k in np.linspace(0.3, 8.0, 40):
        t, r, _, _ = network_amplitudes(3, edges, k, alpha)
        tm = cascade([ring_transfer_matrix(spec, k)] * 2)
        assert abs(tm.t - t) < 1e-9
        assert abs(tm.r - r) < 1e-9


def test_chain_with_links_matches_network():
    spec = RingSpec(1.0, 2.1)
    gap = 0.37
    edges = [(0, 1, 1.0, 0), (0, 1, 2.1, 0), (1, 2, gap, 0), (2, 3, 1.0, 0), (2, 3, 2.1, 0)]
    for k in (0.5, 1.7, 4.2):
        t, r, _, _ = network_amplitudes(4, edges, k)
        tm = cascade([ring_transfer_matrix(spec, k)] * 2, [gap])
        # every element keeps its own vertex-based coordinates, as the network does
        assert abs(tm.t - t) < 1e-10
        assert abs(tm.r - r) < 1e-10


def _arm_coefficient(x, y):
    g = TwoTerminalGraph.ring(x, y)  # k = 1, so lengths are the phases
    psi = solve_vertex_amplitudes(assemble_gamma(g, 1.0))
    return edge_wavefunction(psi, g.edges[0], 1.0).a


def test_arm_coefficient_diverges_in_one_limit_order_only():
    # dy -> 0 first: the ring sits on its resonance and a1 grows like i / (x - pi)
    a_div = _arm_coefficient(math.pi + 5e-7, math.pi - 5e-7)
    assert abs(a_div) > 1e6 and abs(a_div.imag) > 100 * abs(a_div.real)
    # x -> pi first at fixed dy: a1 settles to a finite value
    vals = [_arm_coefficient(math.pi + e, math.pi - e + 1e-3) for e in (1e-5, 1e-6, 1e-7)]
    assert max(abs(v) for v in vals) < 2
    # the approach is linear in the offset, so each decade shrinks the step tenfold
    assert abs(vals[2] - vals[1]) < 0.2 * abs(vals[1] - vals[0])
