"""Two-arm ring models: closed forms, flux, resonance classification and limits.

Notation: ``x = k l1``, ``y = k l2``, ``L = l1 + l2``, ``phi = alpha L``.  With
flux the upper arm (``l1``) carries orientation ``+1`` and the lower ``-1``.
The closed forms below are the left-incidence solutions of the two-vertex
system, written so that they stay finite at ``sin x = 0`` or ``sin y = 0``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .core import (
    CompositeRing,
    ScatteringPreset,
    ScatteringResult,
    TwoTerminalGraph,
    VertexAmplitudeError,
)
from .transfer import TransferMatrix, m_from_amplitudes

TWO_PI = 2 * math.pi
RESONANCE_TOL = 1e-10
CAUCHY_TOL = 1e-5


class NonConvergent(VertexAmplitudeError):
    pass


@dataclass(frozen=True)
class RingSpec:
    l1: float
    l2: float
    alpha: float = 0.0

    def __post_init__(self):
        if not (self.l1 > 0 and self.l2 > 0):
            raise ValueError("arm lengths must be positive")

    @property
    def L(self) -> float:
        return self.l1 + self.l2

    def graph(self, boundary: ScatteringPreset = ScatteringPreset.LEFT) -> TwoTerminalGraph:
        return TwoTerminalGraph.ring(self.l1, self.l2, self.alpha, boundary)

    def flipped(self) -> "RingSpec":
        """Mirror image seen from the right lead: the flux changes sign."""
        return RingSpec(self.l1, self.l2, -self.alpha)


# --- closed forms --------------------------------------------------------------


def ring_t_symmetric(l: float, k: float) -> complex:
    kl = k * l
    return 4j / (5 * math.sin(kl) + 4j * math.cos(kl))


def ring_r_symmetric(l: float, k: float) -> complex:
    # -3 / (5 + 4i cot kl), multiplied through by sin kl so that sin kl = 0 gives r = 0
    kl = k * l
    s = math.sin(kl)
    return -3 * s / (5 * s + 4j * math.cos(kl))


def _snap_sin_cos(x: float) -> tuple[float, float]:
    """``(sin x, cos x)`` with exact values at multiples of pi/2."""
    q = x / (math.pi / 2)
    m = round(q)
    if abs(q - m) < 1e-13:
        return ((0.0, 1.0, 0.0, -1.0)[m % 4], (1.0, 0.0, -1.0, 0.0)[m % 4])
    return math.sin(x), math.cos(x)


def _sin_cos_offset(x0: float, dx: float) -> tuple[float, float]:
    s0, c0 = _snap_sin_cos(x0)
    sd, cd = math.sin(dx), math.cos(dx)
    return s0 * cd + c0 * sd, c0 * cd - s0 * sd


def ring_amplitudes_offsets(x0: float, dx: float, y0: float, dy: float,
                            phi0: float = 0.0, dphi: float = 0.0,
                            alpha_l1: float = 0.0) -> ScatteringResult:
    """Ring amplitudes at ``x = x0 + dx``, ``y = y0 + dy``, ``phi = phi0 + dphi``.

    Base points that are multiples of pi/2 are treated exactly, so the offsets
    can shrink far below machine epsilon relative to the base point.
    ``alpha_l1`` only sets the overall phase of ``t``.
    """
    s1, c1 = _sin_cos_offset(x0, dx)
    s2, _ = _sin_cos_offset(y0, dy)
    sp, cp = _sin_cos_offset((x0 + y0) / 2, (dx + dy) / 2)  # half sum
    sm, cm = _sin_cos_offset((x0 - y0) / 2, (dx - dy) / 2)  # half difference
    sh, ch = _sin_cos_offset(phi0 / 2, dphi / 2)
    sin_sum = 2 * sp * cp
    # 1 - cos x cos y - 2 sin^2(phi/2) replaces 1 - cos x cos y + cos phi - 1
    den = 1.5 * s1 * s2 + 1j * sin_sum + sp * sp + sm * sm - 2 * sh * sh
    # sin y + e^{i phi} sin x = (sin x + sin y) + (e^{i phi} - 1) sin x
    num = 2 * sp * cm + 2j * sh * complex(ch, sh) * s1
    t = 1j * cmath.exp(-1j * alpha_l1) * num / den
    r = (s1 * s2 + 1j * sin_sum) / den - 1
    return ScatteringResult(t, r)


def ring_amplitudes_asymmetric(spec: RingSpec, k: float) -> ScatteringResult:
    """Closed-form ``(t, r)`` of the two-arm ring, with or without flux.

    ``t = i (e^{-i alpha l1} sin y + e^{i alpha l2} sin x) / D`` and
    ``r = (sin x sin y + i sin(x + y)) / D - 1`` with
    ``D = 3/2 sin x sin y + i sin(x + y) - cos x cos y + cos(alpha L)``.
    """
    x, y = k * spec.l1, k * spec.l2
    a = spec.alpha
    sx, sy = math.sin(x), math.sin(y)
    # cos(aL) - cos x cos y written as squares so it keeps its digits near x, y = pi n
    gap = (math.sin((x + y) / 2) ** 2 + math.sin((x - y) / 2) ** 2
           - 2 * math.sin(a * spec.L / 2) ** 2)
    den = 1.5 * sx * sy + 1j * math.sin(x + y) + gap
    if den == 0:
        from .solver import SingularGamma
        raise SingularGamma(f"ring denominator vanishes at k={k}")
    t = 1j * (cmath.exp(-1j * a * spec.l1) * sy + cmath.exp(1j * a * spec.l2) * sx) / den
    r = (sx * sy + 1j * math.sin(x + y)) / den - 1
    return ScatteringResult(t, r)


def ring_transfer_matrix(spec: RingSpec, k: float) -> TransferMatrix:
    """``M`` of one ring; with flux the right-incidence pair is the mirrored ring's."""
    left = ring_amplitudes_asymmetric(spec, k)
    if spec.alpha == 0.0:
        return m_from_amplitudes(left.t, left.r, k)
    right = ring_amplitudes_asymmetric(spec.flipped(), k)
    return m_from_amplitudes(left.t, left.r, k, right.t, right.r)


def ring_element(spec: RingSpec, k: float) -> CompositeRing:
    """The ring packaged as a potential descriptor at fixed ``k``."""
    left = ring_amplitudes_asymmetric(spec, k)
    if spec.alpha == 0.0:
        return CompositeRing(k, left.t, left.r)
    right = ring_amplitudes_asymmetric(spec.flipped(), k)
    return CompositeRing(k, left.t, left.r, right.t, right.r)


# --- resonances --------------------------------------------------------------


class ResonanceKind(str, Enum):
    FTR = "FTR"
    STR = "STR"


@dataclass(frozen=True)
class ResonanceReport:
    kind: ResonanceKind
    k_res: float
    n_index: int
    width: float
    beta: complex | None = None
    omega: complex | None = None

    @property
    def removable(self) -> bool:
        return self.kind is ResonanceKind.FTR and self.width < 1e-12

    def as_dict(self) -> dict:
        out = {"kind": self.kind.value, "n": self.n_index, "k_res": self.k_res, "width": self.width}
        if self.omega is not None:
            out["omega_re"], out["omega_im"] = self.omega.real, self.omega.imag
            out["beta_re"], out["beta_im"] = self.beta.real, self.beta.imag
        return out


def omega_beta(spec: RingSpec, n: int) -> tuple[complex, complex]:
    """Local form ``t ~ beta dk / (dk + Omega)`` at ``k = 2 pi n / L``.

    From the first-order expansion of numerator and denominator of ``t`` in
    ``dk``, with ``delta = (l2 - l1) / L``:
    ``Omega = i (1 - cos 2 pi n delta) / (4 L + i (l2 - l1) sin 2 pi n delta)`` and
    ``beta = 4 (-1)^n cos(pi n delta) / (4 + i delta sin 2 pi n delta)``.
    """
    if spec.alpha != 0.0:
        _require_gauge_trivial(spec)
    L = spec.L
    dl = spec.l2 - spec.l1
    d = dl / L
    s2 = math.sin(TWO_PI * n * d)
    omega = 1j * (1 - math.cos(TWO_PI * n * d)) / (4 * L + 1j * dl * s2)
    beta = 4 * (-1) ** n * math.cos(math.pi * n * d) / (4 + 1j * d * s2)
    return omega, beta


def _require_gauge_trivial(spec: RingSpec) -> None:
    m = spec.alpha * spec.L / TWO_PI
    if abs(m - round(m)) > RESONANCE_TOL:
        raise ValueError("resonance classification needs alpha L in 2 pi Z")


def _transmission(spec: RingSpec) -> Callable[[float], float]:
    return lambda k: ring_amplitudes_asymmetric(spec, k).T


def _half_width_point(T, k0: float, direction: float, limit: float, n_steps: int = 400):
    """First ``k`` between ``k0`` and ``limit`` where ``T`` reaches 1/2."""
    ks = k0 + direction * np.linspace(0, abs(limit - k0), n_steps + 1)[1:]
    prev = k0
    for k in ks:
        if T(k) >= 0.5:
            return brentq(lambda q: T(q) - 0.5, prev, k, xtol=1e-14)
        prev = k
    return math.nan


def str_width(spec: RingSpec, k_res: float) -> float:
    """Full width of the transmission dip at ``T = 1/2``."""
    T = _transmission(spec)
    half_spacing = math.pi / abs(spec.l2 - spec.l1)
    lo = _half_width_point(T, k_res, -1, max(k_res - half_spacing, 1e-9))
    hi = _half_width_point(T, k_res, +1, k_res + half_spacing)
    return hi - lo


def dip_fwhm(T, k_res: float, search: float) -> float:
    """Full width at half depth of a dip of ``T`` centred at ``k_res``.

    The background is the mean of ``T`` at ``k_res +- search``; each side of the
    dip must cross the half-depth level inside the window.
    """
    t0 = T(k_res)
    base = 0.5 * (T(k_res - search) + T(k_res + search))
    level = t0 + 0.5 * (base - t0)
    g = lambda q: T(q) - level
    hi = brentq(g, k_res, k_res + search, xtol=1e-15)
    lo = brentq(g, k_res - search, k_res, xtol=1e-15)
    return hi - lo


def find_resonances(spec: RingSpec, k_min: float, k_max: float) -> list[ResonanceReport]:
    """FTR (``kL = 2 pi n``) and STR (``k |l2 - l1| = (2n+1) pi``) in ``[k_min, k_max]``.

    Requires ``alpha L`` to be a multiple of ``2 pi`` (gauge-equivalent to no flux).
    """
    if not (math.isfinite(k_min) and math.isfinite(k_max)):
        raise ValueError("k range must be finite")
    if spec.alpha != 0.0:
        _require_gauge_trivial(spec)
    out: list[ResonanceReport] = []
    if k_max < k_min:
        return out
    L = spec.L
    for n in range(max(1, math.ceil(k_min * L / TWO_PI)), math.floor(k_max * L / TWO_PI) + 1):
        k = TWO_PI * n / L
        if not k_min <= k <= k_max:
            continue
        omega, beta = omega_beta(spec, n)
        out.append(ResonanceReport(ResonanceKind.FTR, k, n, abs(omega), beta, omega))
    dl = abs(spec.l2 - spec.l1)
    if dl > 0:
        n_lo = max(0, math.ceil((k_min * dl / math.pi - 1) / 2))
        n_hi = math.floor((k_max * dl / math.pi - 1) / 2)
        for n in range(n_lo, n_hi + 1):
            k = (2 * n + 1) * math.pi / dl
            if not k_min <= k <= k_max or k <= 0:
                continue
            out.append(ResonanceReport(ResonanceKind.STR, k, n, str_width(spec, k)))
    out.sort(key=lambda rep: rep.k_res)
    return out


def _near_integer(x: float, tol: float = RESONANCE_TOL) -> int | None:
    m = round(x)
    return m if abs(x - m) <= tol else None


def ab_ftr_condition(spec: RingSpec, k: float) -> bool:
    """Both ``k L = 2 pi n`` (``n >= 1``) and ``alpha L = 2 pi m`` hold."""
    n = _near_integer(k * spec.L / TWO_PI)
    m = _near_integer(spec.alpha * spec.L / TWO_PI)
    return n is not None and n >= 1 and m is not None


# --- noncommuting limits --------------------------------------------------------


def richardson_limit(values: Sequence[complex], ratio: float = 10.0) -> tuple[complex, float]:
    """First-order Richardson extrapolation of ``f(h_j)`` with ``h_{j+1} = h_j / ratio``.

    Returns the last extrapolant and its distance to the previous one.
    """
    v = np.asarray(values, dtype=complex)
    if v.size < 3:
        raise ValueError("need at least three samples")
    ext = (ratio * v[1:] - v[:-1]) / (ratio - 1)
    return complex(ext[-1]), float(abs(ext[-1] - ext[-2]))


EPS_SEQUENCE = tuple(10.0 ** -j for j in range(2, 7))


def iterated_limit(f: Callable[[float, float], complex], inner_scale: Callable[[float], float],
                   outer: Sequence[float] = EPS_SEQUENCE, inner: Sequence[float] = EPS_SEQUENCE,
                   tol: float = CAUCHY_TOL) -> complex:
    """``lim_{h -> 0} lim_{e -> 0} f(h, e)`` along geometric sequences.

    The inner offsets are ``inner_scale(h) * e`` so that they stay inside the
    region where the inner limit is already settled.
    """
    outer_vals = []
    for h in outer:
        val, err = richardson_limit([f(h, inner_scale(h) * e) for e in inner])
        if err > tol:
            raise NonConvergent(f"inner limit at h={h:g} not settled (step {err:.2e})")
        outer_vals.append(val)
    val, err = richardson_limit(outer_vals)
    if err > tol:
        raise NonConvergent(f"outer limit not settled (step {err:.2e})")
    return val


class LimitOrder(str, Enum):
    LENGTH_FIRST = "length_first"
    K_FIRST = "k_first"
    ALPHA_FIRST = "alpha_first"


def limit_probe(spec: RingSpec, order: LimitOrder | str, target) -> tuple[complex, complex]:
    """Iterated limits of ``(t, r)`` at a singular first-type resonance.

    * ``spec.alpha == 0``: ``target = n``.  The variables are ``x = k l1 -> pi n``
      and ``dy = k l2 + k l1 - 2 pi -> 0``.  ``LENGTH_FIRST`` takes ``dy -> 0``
      first, ``K_FIRST`` takes ``x -> pi n`` first.
    * flux: ``target = (k0, alpha0)``.  ``K_FIRST`` takes ``k -> k0`` first,
      ``ALPHA_FIRST`` takes ``alpha -> alpha0`` first.
    """
    order = LimitOrder(order)
    if spec.alpha == 0.0 and not isinstance(target, tuple):
        n = int(target)
        x0, y0 = math.pi * n, (2 - n) * math.pi

        def amp(eta, eps):
            return ring_amplitudes_offsets(x0, eta, y0, eps - eta)

        if order is LimitOrder.LENGTH_FIRST:
            pair = [lambda h, e, c=c: getattr(amp(h, e), c) for c in "tr"]
        elif order is LimitOrder.K_FIRST:
            pair = [lambda h, e, c=c: getattr(amp(e, h), c) for c in "tr"]
        else:
            raise ValueError("alpha_first needs a flux target (k0, alpha0)")
    else:
        k0, a0 = target
        l1, l2, L = spec.l1, spec.l2, spec.L

        def amp(dk, da):
            return ring_amplitudes_offsets(k0 * l1, dk * l1, k0 * l2, dk * l2,
                                           a0 * L, da * L, (a0 + da) * l1)

        if order is LimitOrder.K_FIRST:
            pair = [lambda h, e, c=c: getattr(amp(e, h), c) for c in "tr"]
        elif order is LimitOrder.ALPHA_FIRST:
            pair = [lambda h, e, c=c: getattr(amp(h, e), c) for c in "tr"]
        else:
            raise ValueError("length_first applies to the ring without flux")
    return tuple(iterated_limit(f, lambda h: h * h) for f in pair)
