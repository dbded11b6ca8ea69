"""Transfer matrices of single scatterers and their cascades.

Convention: ``M`` maps the plane-wave coefficients to the right of a scatterer
onto those to its left, ``(a, b) = M (c, d)`` with ``psi = a e^{ikx} + b e^{-ikx}``
on the left and ``c e^{ikx} + d e^{-ikx}`` on the right.  Left incidence
``(1, r) = M (t, 0)`` then gives ``t = 1/M11`` and ``r = M21/M11``, and a chain
``M_1 M_2 ... M_N`` (left to right) has ``t = 1/(M_tot)_11``.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import _ode
from .core import (
    UNITS,
    ComplexMat2,
    CompositeRing,
    Free,
    ScatteringResult,
    SquareBarrier,
    SquareWell,
    Tabulated,
    VertexAmplitudeError,
    csqrt,
    mat2_mul,
)

MIN_TRANSMISSION = 1e-12
K_MATCH_TOL = 1e-12


class ZeroTransmission(VertexAmplitudeError):
    """Raised when ``|t|`` is too small for ``M`` to exist (a total-reflection point)."""


class MixedWaveNumber(VertexAmplitudeError, ValueError):
    pass


@dataclass(frozen=True)
class TransferMatrix:
    m: ComplexMat2
    k: complex

    @property
    def t(self) -> complex:
        return 1 / self.m.m11

    @property
    def r(self) -> complex:
        return self.m.m21 / self.m.m11

    def amplitudes(self) -> ScatteringResult:
        return ScatteringResult(self.t, self.r)

    def flux_defect(self) -> float:
        """``| |M11|^2 - |M12|^2 - 1 |``; zero for a lossless, time-reversal-even scatterer."""
        return abs(abs(self.m.m11) ** 2 - abs(self.m.m12) ** 2 - 1)

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        return m_compose([self, other])


def m_from_amplitudes(t: complex, r: complex, k: complex = float("nan"),
                      t_right: complex | None = None,
                      r_right: complex | None = None) -> TransferMatrix:
    """Build ``M`` from scattering amplitudes.

    With only the left-incidence pair this is the time-reversal-even form
    ``[[1/t, r*/t*], [r/t, 1/t*]]``.  Passing the right-incidence pair as well
    gives the general reciprocal-or-not form
    ``[[1/t, -r'/t], [r/t, (t t' - r r')/t]]``, needed once flux breaks
    time-reversal symmetry.
    """
    if abs(t) < MIN_TRANSMISSION:
        raise ZeroTransmission(f"|t| = {abs(t):.3e}: transfer matrix does not exist")
    if t_right is None and r_right is None:
        m = ComplexMat2(1 / t, (r / t).conjugate(), r / t, (1 / t).conjugate())
    else:
        tr = t if t_right is None else t_right
        rr = r if r_right is None else r_right
        m = ComplexMat2(1 / t, -rr / t, r / t, (t * tr - r * rr) / t)
    return TransferMatrix(m, k)


def _plane_wave_basis_inv(k: complex, x: float) -> ComplexMat2:
    """Inverse of ``(a, b) -> (psi(x), psi'(x))`` for ``a e^{ikx} + b e^{-ikx}``."""
    e = cmath.exp(1j * k * x)
    ik = 1j * k
    return ComplexMat2(0.5 / e, 0.5 / (e * ik), 0.5 * e, -0.5 * e / ik)


def _plane_wave_basis(k: complex, x: float) -> ComplexMat2:
    e = cmath.exp(1j * k * x)
    ik = 1j * k
    return ComplexMat2(e, 1 / e, ik * e, -ik / e)


def m_from_propagator(back: ComplexMat2, x0: float, x1: float, k: complex) -> TransferMatrix:
    """``M`` for a region ``[x0, x1]`` whose backward propagator maps
    ``(psi, psi')(x1)`` to ``(psi, psi')(x0)``."""
    m = mat2_mul(mat2_mul(_plane_wave_basis_inv(k, x0), back), _plane_wave_basis(k, x1))
    return TransferMatrix(m, k)


def _constant_backward(level_inv_nm2: float, width: float, k: complex) -> ComplexMat2:
    q = csqrt(k * k - level_inv_nm2)
    qw = q * width
    c = cmath.cos(qw)
    sinc_w = width * (cmath.sin(qw) / qw if abs(qw) > 1e-8 else 1 - qw * qw / 6)
    return ComplexMat2(c, -sinc_w, q * q * sinc_w, c)


def m_square_well(depth_ev: float, width: float, k: complex) -> TransferMatrix:
    """``M`` of a constant potential ``depth_ev`` on ``[0, width]``.

    ``depth_ev`` may be positive (barrier); below the barrier top ``q`` is
    imaginary and the trigonometric forms continue into cosh/sinh.
    """
    if not width > 0:
        raise ValueError("width must be positive")
    back = _constant_backward(depth_ev / UNITS.hbar2_over_2m, width, k)
    return m_from_propagator(back, 0.0, width, k)


def m_tabulated(potential: Tabulated, k: complex, step: float = _ode.DEFAULT_STEP) -> TransferMatrix:
    x0, x1 = float(potential.xi[0]), float(potential.xi[-1])
    fwd = _ode.endpoint_propagators(potential, [k * k], x0, x1, step)
    a, b, c, d = (complex(v[0]) for v in fwd)
    det = a * d - b * c
    back = ComplexMat2(d / det, -b / det, -c / det, a / det)
    # the propagator is translation invariant: place the support at [0, width]
    return m_from_propagator(back, 0.0, x1 - x0, k)


def _shift(tm: TransferMatrix, x: float) -> TransferMatrix:
    """Re-express ``M`` after moving the scatterer by ``x``."""
    d = ComplexMat2.diag(cmath.exp(-1j * tm.k * x), cmath.exp(1j * tm.k * x))
    dinv = ComplexMat2.diag(cmath.exp(1j * tm.k * x), cmath.exp(-1j * tm.k * x))
    return TransferMatrix(mat2_mul(mat2_mul(d, tm.m), dinv), tm.k)


def m_potential(potential, k: complex, at: float = 0.0) -> TransferMatrix:
    """``M`` of any potential descriptor with its support starting at ``at``."""
    if isinstance(potential, Free):
        return TransferMatrix(ComplexMat2.identity(), k)
    if isinstance(potential, SquareWell):
        tm = m_square_well(potential.depth_ev, potential.width, k)
    elif isinstance(potential, SquareBarrier):
        tm = m_square_well(potential.height_ev, potential.width, k)
    elif isinstance(potential, Tabulated):
        tm = m_tabulated(potential, k)
    elif isinstance(potential, CompositeRing):
        if abs(potential.k - k) > K_MATCH_TOL * max(1.0, abs(k)):
            raise MixedWaveNumber(f"composite element built at k={potential.k}, used at k={k}")
        tm = m_from_amplitudes(potential.t, potential.r, k,
                               potential.t_right, potential.r_right)
    else:
        raise TypeError(f"unknown potential descriptor {potential!r}")
    return tm if at == 0 else _shift(tm, at)


def m_free_segment(length: float, k: complex) -> TransferMatrix:
    if length < 0:
        raise ValueError("segment length must be non-negative")
    return TransferMatrix(ComplexMat2.diag(cmath.exp(-1j * k * length),
                                           cmath.exp(1j * k * length)), k)


def m_compose(chain: Sequence[TransferMatrix]) -> TransferMatrix:
    chain = list(chain)
    if not chain:
        raise ValueError("empty chain")
    k = chain[0].k
    out = chain[0].m
    for tm in chain[1:]:
        if not _same_k(tm.k, k):
            raise MixedWaveNumber(f"chain mixes k={k} and k={tm.k}")
        out = mat2_mul(out, tm.m)
    return TransferMatrix(out, k)


def _same_k(a: complex, b: complex) -> bool:
    if a != a or b != b:  # nan marks "unspecified"
        return True
    return abs(a - b) <= K_MATCH_TOL * max(1.0, abs(a))


def cascade(elements: Iterable[TransferMatrix], links: Sequence[float] | None = None) -> TransferMatrix:
    """Compose elements left to right, inserting free segments of ``links[i]``
    between element ``i`` and ``i + 1`` (zero separation by default)."""
    elements = list(elements)
    if links is not None and len(links) != len(elements) - 1:
        raise ValueError(f"need {len(elements) - 1} link lengths, got {len(links)}")
    chain: list[TransferMatrix] = []
    for i, el in enumerate(elements):
        chain.append(el)
        if links is not None and i < len(links) and links[i] > 0:
            chain.append(m_free_segment(links[i], el.k))
    return m_compose(chain)
