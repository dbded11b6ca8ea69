"""Vertex-amplitude solver for two-terminal graphs.

Every edge runs from the in-vertex (amplitude ``Psi1``) to the out-vertex
(``Psi2``).  On an edge the field near the in-vertex is
``a e^{ik xi} + b e^{-ik xi}`` and near the out-vertex ``c e^{ik xi} + d e^{-ik xi}``
with ``(a, b) = M (c, d)``.  Continuity fixes ``(a, b) = G1 (Psi1, Psi2)`` and
``(c, d) = G2 (Psi1, Psi2)`` with ``G2 = M^-1 G1``.  Kirchhoff's rule at the two
vertices, divided by ``ik``, then gives the 2x2 system ``Gamma Psi = F`` with

    Gamma = diag(1, -1) + Gamma_t,
    Gamma_t = sum_edges [[G1_11 - G1_21,              G1_12 - G1_22],
                         [G2_11 e^{ikl} - G2_21 e^{-ikl}, G2_12 e^{ikl} - G2_22 e^{-ikl}]].

A flux ``alpha`` enters through the gauge ``psi = e^{-i s alpha xi} phi`` on an arm
with orientation ``s``; ``phi`` obeys the field-free equation, so only the
vertex data change (``phi(l) = e^{i s alpha l} Psi2`` and covariant derivatives).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import _ode
from .core import (
    ComplexMat2,
    EdgeSpec,
    ScatteringPreset,
    ScatteringResult,
    SquareBarrier,
    SquareWell,
    Tabulated,
    TwoTerminalGraph,
    VertexAmplitudeError,
    UNITS,
    csqrt,
    mat2_inv,
    mat2_mul,
)
from .transfer import m_potential

EDGE_SIN_TOL = 1e-12
GAMMA_REL_TOL = 1e-12
J = ComplexMat2.diag(1, -1)


class EdgeResonanceSingularity(VertexAmplitudeError):
    """``sin(kl) = 0`` on an edge: the continuity map is not invertible."""


class SingularGamma(VertexAmplitudeError):
    pass


@dataclass(frozen=True)
class GammaPair:
    """Continuity maps of one edge and its rows of ``Gamma_t``.

    ``det_c`` is the determinant of the edge's ``Gamma_t`` contribution,
    evaluated from the edge propagator so that it keeps full relative accuracy
    near ``sin(kl) = 0`` where the individual entries blow up.
    """

    g1: ComplexMat2
    g2: ComplexMat2
    edge_index: int = 0
    row1: tuple[complex, complex] = (0j, 0j)
    row2: tuple[complex, complex] = (0j, 0j)
    det_c: complex = -1.0
    angle: float | None = None  # kl for a free edge
    gauge: float = 0.0  # s alpha l

    def contribution(self) -> ComplexMat2:
        return ComplexMat2(self.row1[0], self.row1[1], self.row2[0], self.row2[1])


def _free_gamma_pair(length: float, k: float, gauge: float, index: int) -> GammaPair:
    s = cmath.sin(k * length)
    if abs(s) < EDGE_SIN_TOL:
        raise EdgeResonanceSingularity(f"edge {index}: |sin(kl)| = {abs(s):.3e}")
    phase = cmath.exp(1j * gauge)
    e = cmath.exp(1j * k * length)
    # (a, b) from a + b = Psi1, a e + b/e = phase * Psi2
    inv = 1 / (e - 1 / e)
    g = ComplexMat2(-inv / e, inv * phase, inv * e, -inv * phase)
    cot = cmath.cos(k * length) / s
    csc = 1 / s
    row1 = (1j * cot, -1j * csc * phase)
    row2 = (1j * csc / phase, -1j * cot)
    return GammaPair(g, g, index, row1, row2, -1.0, k * length, gauge)


def _free_propagator(length: float, k: float) -> ComplexMat2:
    c, s = math.cos(k * length), math.sin(k * length)
    return ComplexMat2(c, s / k, -k * s, c)


def edge_propagator(edge: EdgeSpec, k: float) -> ComplexMat2:
    """Forward map ``(psi, psi')(0) -> (psi, psi')(l)`` across the whole edge."""
    if edge.is_free:
        return _free_propagator(edge.length, k)
    pot = edge.potential
    x0 = edge.support_start
    w = pot.width
    if isinstance(pot, (SquareWell, SquareBarrier)):
        q = csqrt(k * k - pot.level_ev / UNITS.hbar2_over_2m)
        qw = q * w
        c = cmath.cos(qw)
        sinc_w = w * (cmath.sin(qw) / qw if abs(qw) > 1e-8 else 1 - qw * qw / 6)
        inner = ComplexMat2(c, sinc_w, -q * q * sinc_w, c)
    elif isinstance(pot, Tabulated):
        a, b, cc, d = (complex(v[0]) for v in _ode.endpoint_propagators(
            pot, [k * k], float(pot.xi[0]), float(pot.xi[-1])))
        inner = ComplexMat2(a, b, cc, d)
    else:
        # only amplitudes are known: go through the plane-wave basis
        m = m_potential(pot, k).m
        e = cmath.exp(1j * k * w)
        basis_w = ComplexMat2(e, 1 / e, 1j * k * e, -1j * k / e)
        basis0_inv = ComplexMat2(0.5, 0.5 / (1j * k), 0.5, -0.5 / (1j * k))
        inner = mat2_mul(mat2_mul(basis_w, mat2_inv(m)), basis0_inv)
    out = inner
    if x0 > 0:
        out = mat2_mul(out, _free_propagator(x0, k))
    rest = edge.length - x0 - w
    if rest > 0:
        out = mat2_mul(_free_propagator(rest, k), out)
    return out


def gamma_pair_for_edge(edge: EdgeSpec, k: float, flux_alpha: float = 0.0,
                        edge_index: int = 0) -> GammaPair:
    """Continuity maps ``G1``, ``G2`` of one edge and its row contributions to ``Gamma_t``."""
    if not k > 0:
        raise ValueError("k must be positive")
    gauge = edge.ab_sign * flux_alpha * edge.length
    if edge.is_free:
        return _free_gamma_pair(edge.length, k, gauge, edge_index)

    phase = cmath.exp(1j * gauge)
    m = m_potential(edge.potential, k, at=edge.support_start).m
    minv = mat2_inv(m)
    e = cmath.exp(1j * k * edge.length)
    # (c, d) = M^-1 (a, b) must reproduce phi(l) = phase * Psi2
    a_mat = ComplexMat2(1, 1, e * minv.m11 + minv.m21 / e, e * minv.m12 + minv.m22 / e)
    scale = max(a_mat.norm(), 1.0)
    if abs(a_mat.det()) < 2 * EDGE_SIN_TOL * scale * scale:
        raise EdgeResonanceSingularity(f"edge {edge_index}: continuity map is singular")
    g1 = mat2_mul(mat2_inv(a_mat), ComplexMat2.diag(1, phase))
    g2 = mat2_mul(minv, g1)
    row1 = (g1.m11 - g1.m21, g1.m12 - g1.m22)
    row2 = ((g2.m11 * e - g2.m21 / e) / phase, (g2.m12 * e - g2.m22 / e) / phase)
    p = edge_propagator(edge, k)
    # det of the contribution is p21 / (k^2 p12) because det p = 1
    return GammaPair(g1, g2, edge_index, row1, row2, p.m21 / (k * k * p.m12), None, gauge)


def _mixed(a: GammaPair, b: GammaPair) -> complex:
    """Polarisation ``det(A + B) - det A - det B`` of two contributions."""
    if a.angle is not None and b.angle is not None:
        # 2 (cos x cos y - cos theta) / (sin x sin y) without cancellation
        th = a.gauge - b.gauge
        num = 2 * math.sin(th / 2) ** 2 - math.sin((a.angle + b.angle) / 2) ** 2 \
            - math.sin((a.angle - b.angle) / 2) ** 2
        return 2 * num / (math.sin(a.angle) * math.sin(b.angle))
    return (a.row1[0] * b.row2[1] + a.row2[1] * b.row1[0]
            - a.row1[1] * b.row2[0] - a.row2[0] * b.row1[1])


def _gamma_det(groups: list[tuple[GammaPair, int]]) -> complex:
    """``det(J + sum_g n_g C_g)`` expanded over groups of identical edges."""
    det = -1.0 + 0j
    for pair, n in groups:
        det += n * n * pair.det_c + n * (pair.row2[1] - pair.row1[0])
    for i, (a, na) in enumerate(groups):
        for b, nb in groups[i + 1:]:
            det += na * nb * _mixed(a, b)
    return det


def _boundary_f(preset: ScatteringPreset, gamma: ComplexMat2, det: complex) -> tuple[complex, complex]:
    if preset is ScatteringPreset.LEFT:
        return (2, 0)
    if preset is ScatteringPreset.RIGHT:
        return (0, -2)
    # Jost data are the scattering solutions renormalised by their transmission
    if preset is ScatteringPreset.JOST1:
        t = _solve(gamma, (2, 0), det)[1]
        return (2 / t, 0)
    if preset is ScatteringPreset.JOST2:
        t_right = _solve(gamma, (0, -2), det)[0]
        return (0, -2 / t_right)
    raise ValueError(f"unknown preset {preset!r}")


@dataclass(frozen=True)
class GammaSystem:
    gamma: ComplexMat2
    f: tuple[complex, complex]
    k: float
    preset: ScatteringPreset = ScatteringPreset.LEFT
    pairs: tuple[GammaPair, ...] = field(default=(), repr=False)
    det: complex | None = None

    @property
    def gamma_t(self) -> ComplexMat2:
        g = self.gamma
        return ComplexMat2(g.m11 - 1, g.m12, g.m21, g.m22 + 1)

    def determinant(self) -> complex:
        return self.gamma.det() if self.det is None else self.det


def assemble_gamma(graph: TwoTerminalGraph, k: float) -> GammaSystem:
    # identical edges share one pair; their contributions add up exactly
    cache: dict = {}
    counts: dict = {}
    pairs = []
    for i, e in enumerate(graph.edges):
        if e not in cache:
            cache[e] = gamma_pair_for_edge(e, k, graph.flux_alpha, i)
        counts[e] = counts.get(e, 0) + 1
        pairs.append(cache[e])
    groups = [(cache[e], n) for e, n in counts.items()]
    r11 = sum(n * p.row1[0] for p, n in groups)
    r12 = sum(n * p.row1[1] for p, n in groups)
    r21 = sum(n * p.row2[0] for p, n in groups)
    r22 = sum(n * p.row2[1] for p, n in groups)
    gamma = ComplexMat2(1 + r11, r12, r21, -1 + r22)
    det = _gamma_det(groups)
    f = _boundary_f(graph.boundary, gamma, det)
    return GammaSystem(gamma, f, k, graph.boundary, tuple(pairs), det)


@dataclass(frozen=True)
class VertexAmplitudes:
    psi1: complex
    psi2: complex

    def __iter__(self):
        return iter((self.psi1, self.psi2))


def _solve(gamma: ComplexMat2, f, det: complex | None = None) -> tuple[complex, complex]:
    if det is None:
        det = gamma.det()
    scale = gamma.norm()
    if abs(det) <= 1e-300 or abs(det) < GAMMA_REL_TOL * scale * scale:
        raise SingularGamma(f"|det Gamma| = {abs(det):.3e} (|Gamma| = {scale:.3e})")
    f1, f2 = f
    # adjugate solve
    return ((gamma.m22 * f1 - gamma.m12 * f2) / det,
            (-gamma.m21 * f1 + gamma.m11 * f2) / det)


def solve_vertex_amplitudes(sys: GammaSystem) -> VertexAmplitudes:
    return VertexAmplitudes(*_solve(sys.gamma, sys.f, sys.det))


def residual(sys: GammaSystem, psi: VertexAmplitudes) -> float:
    g1, g2 = sys.gamma.apply(psi.psi1, psi.psi2)
    return max(abs(g1 - sys.f[0]), abs(g2 - sys.f[1]))


def amplitudes_from_gamma(sys: GammaSystem) -> ScatteringResult:
    """``(t, r)`` for the left or right problem (``t'``, ``r'`` for the latter)."""
    psi = solve_vertex_amplitudes(sys)
    if sys.preset is ScatteringPreset.LEFT:
        return ScatteringResult(psi.psi2, psi.psi1 - 1)
    if sys.preset is ScatteringPreset.RIGHT:
        return ScatteringResult(psi.psi1, psi.psi2 - 1)
    raise ValueError("amplitudes are defined for the LEFT and RIGHT presets only")


def scatter(graph: TwoTerminalGraph, k: float) -> ScatteringResult:
    return amplitudes_from_gamma(assemble_gamma(graph, k))


# --- fields on edges ---------------------------------------------------------


@dataclass(frozen=True)
class EdgeWaveField:
    """Field on one edge; ``(a, b)`` before the potential, ``(c, d)`` after it.

    ``gauge`` is ``s * alpha``; the physical field is ``e^{-i gauge xi} phi``.
    """

    edge_index: int
    a: complex
    b: complex
    c: complex
    d: complex
    k: float
    edge: EdgeSpec
    gauge: float = 0.0

    def _phi(self, xi):
        xi = np.asarray(xi, dtype=float)
        e = np.exp(1j * self.k * xi)
        left = self.a * e + self.b / e
        dleft = 1j * self.k * (self.a * e - self.b / e)
        if self.edge.is_free:
            return left, dleft
        x0 = self.edge.support_start
        x1 = x0 + self.edge.potential.width
        right = self.c * e + self.d / e
        dright = 1j * self.k * (self.c * e - self.d / e)
        val = np.where(xi < x0, left, right)
        der = np.where(xi < x0, dleft, dright)
        inside = (xi >= x0) & (xi <= x1)
        if np.any(inside):
            e0 = cmath.exp(1j * self.k * x0)
            p0 = self.a * e0 + self.b / e0
            dp0 = 1j * self.k * (self.a * e0 - self.b / e0)
            vi, di = _propagate_inside(self.edge.potential, self.k, x0, p0, dp0, xi[inside])
            val = val.astype(complex)
            der = der.astype(complex)
            val[inside] = vi
            der[inside] = di
        return val, der

    def __call__(self, xi):
        phi, _ = self._phi(xi)
        return np.exp(-1j * self.gauge * np.asarray(xi, dtype=float)) * phi

    def derivative(self, xi):
        """Covariant derivative ``(d/dxi + i gauge) psi``."""
        _, dphi = self._phi(xi)
        return np.exp(-1j * self.gauge * np.asarray(xi, dtype=float)) * dphi

    def current(self) -> float:
        """Probability current along the edge orientation, ``k (|a|^2 - |b|^2)``."""
        return self.k * (abs(self.a) ** 2 - abs(self.b) ** 2)


def _propagate_inside(potential, k, x0, p0, dp0, xs):
    """Field inside the potential support from its data at the support start."""
    if isinstance(potential, (SquareWell, SquareBarrier)):
        level = potential.level_ev / UNITS.hbar2_over_2m
        q = csqrt(k * k - level)
        s = xs - x0
        cq = np.cos(q * s)
        sq = np.sin(q * s)
        sinc = s * np.sinc(q * s / np.pi) if q != 0 else s
        return p0 * cq + dp0 * sinc, -p0 * q * sq + dp0 * cq
    if isinstance(potential, Tabulated):
        lo = float(potential.xi[0])
        nodes, (m11, m12, m21, m22) = _ode.sampled_solutions(
            potential, k * k, lo, float(potential.xi[-1]))
        local = xs - x0 + lo
        u, up = m11 * p0 + m12 * dp0, m21 * p0 + m22 * dp0
        val = np.interp(local, nodes, u.real) + 1j * np.interp(local, nodes, u.imag)
        der = np.interp(local, nodes, up.real) + 1j * np.interp(local, nodes, up.imag)
        return val, der
    raise TypeError(f"cannot evaluate the field inside {potential!r}")


def edge_wavefunction(psi: VertexAmplitudes, edge: EdgeSpec, k: float,
                      flux_alpha: float = 0.0, edge_index: int = 0) -> EdgeWaveField:
    pair = gamma_pair_for_edge(edge, k, flux_alpha, edge_index)
    a, b = pair.g1.apply(psi.psi1, psi.psi2)
    c, d = pair.g2.apply(psi.psi1, psi.psi2)
    return EdgeWaveField(edge_index, a, b, c, d, k, edge, edge.ab_sign * flux_alpha)


def edge_current(psi: VertexAmplitudes, edge: EdgeSpec, k: float,
                 flux_alpha: float = 0.0) -> float:
    """Current from the in- to the out-vertex.

    Free edge: ``k |Psi1| |Psi2| sin(arg Psi2 - arg Psi1 + s alpha l) / sin(kl)``.
    """
    if edge.is_free:
        s = math.sin(k * edge.length)
        if abs(s) < EDGE_SIN_TOL:
            raise EdgeResonanceSingularity(f"|sin(kl)| = {abs(s):.3e}")
        if psi.psi1 == 0 or psi.psi2 == 0:
            return 0.0
        dphase = cmath.phase(psi.psi2) - cmath.phase(psi.psi1) + edge.ab_sign * flux_alpha * edge.length
        return k * abs(psi.psi1) * abs(psi.psi2) * math.sin(dphase) / s
    return edge_wavefunction(psi, edge, k, flux_alpha).current()


# --- sweeps -------------------------------------------------------------------


@dataclass
class SweepResult:
    param: np.ndarray
    t: np.ndarray
    r: np.ndarray
    skipped: list = field(default_factory=list)

    @property
    def ok(self) -> np.ndarray:
        return np.isfinite(self.t.real)

    @property
    def T(self) -> np.ndarray:
        return np.abs(self.t) ** 2

    @property
    def R(self) -> np.ndarray:
        return np.abs(self.r) ** 2


def sweep(fn, params) -> SweepResult:
    """Evaluate ``fn(p) -> ScatteringResult`` over ``params``.

    Singular points are recorded as ``(p, reason)`` and left as NaN.
    """
    params = np.asarray(params, dtype=float)
    t = np.full(params.shape, np.nan, dtype=complex)
    r = np.full(params.shape, np.nan, dtype=complex)
    skipped = []
    for i, p in enumerate(params):
        try:
            res = fn(float(p))
        except VertexAmplitudeError as exc:
            skipped.append((float(p), f"{type(exc).__name__}: {exc}"))
            continue
        t[i], r[i] = res.t, res.r
    return SweepResult(params, t, r, skipped)


def sweep_k(graph: TwoTerminalGraph, ks) -> SweepResult:
    return sweep(lambda k: scatter(graph, k), ks)
