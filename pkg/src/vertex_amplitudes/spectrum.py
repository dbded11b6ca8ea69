"""Finite-support potentials through two independent solutions, and parallel wells.

The potential lives on ``[x1, x2]`` and is zero outside.  With two solutions
``u``, ``v`` of the edge equation and ``Dt = u1 v2 - u2 v1`` the vertex system
has

    Gamma11 = u1' v2 - u2 v1' + ik Dt      Gamma12 = u1 v1' - v1 u1'
    Gamma21 = v2' u2 - u2' v2              Gamma22 = u2' v1 - u1 v2' + ik Dt

and ``det Gamma = Dt * D`` with

    D(k) = (u2' v1' - u1' v2') + ik (Gamma11 + Gamma22 - 2ik Dt) - k^2 Dt.

``D`` is free of the ``Dt`` factor, so it is the quantity we divide by and the
bound-state residual: at ``k = i kappa`` it is real for a real basis.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import _ode
from .core import (
    UNITS,
    Free,
    ScatteringResult,
    SquareBarrier,
    SquareWell,
    Tabulated,
    VertexAmplitudeError,
    csqrt,
)

WRONSKIAN_TOL = 1e-8
DEGENERATE_TOL = 1e-12
KAPPA_TOL = 1e-10


class StepTooCoarse(VertexAmplitudeError):
    pass


class DegenerateBasis(VertexAmplitudeError):
    pass


def support(potential) -> tuple[float, float]:
    if isinstance(potential, (SquareWell, SquareBarrier)):
        return 0.0, float(potential.width)
    if isinstance(potential, Tabulated):
        return float(potential.xi[0]), float(potential.xi[-1])
    raise ValueError(f"no finite support for {potential!r}; pass x_start/x_end")


def min_level_ev(potential) -> float:
    if isinstance(potential, Tabulated):
        return float(np.min(potential.v_ev))
    if isinstance(potential, (SquareWell, SquareBarrier)):
        return float(potential.level_ev)
    return 0.0


@dataclass(frozen=True, eq=False)
class SolutionPair:
    """Two solutions sampled on ``nodes``; ``u`` starts as ``(1, 0)``, ``v`` as ``(0, 1)``."""

    nodes: np.ndarray
    u: np.ndarray
    du: np.ndarray
    v: np.ndarray
    dv: np.ndarray
    step: float = field(default=_ode.DEFAULT_STEP)

    @property
    def x1(self) -> float:
        return float(self.nodes[0])

    @property
    def x2(self) -> float:
        return float(self.nodes[-1])

    @property
    def endpoints(self):
        """``(u1, u1', v1, v1', u2, u2', v2, v2')``."""
        return (self.u[0], self.du[0], self.v[0], self.dv[0],
                self.u[-1], self.du[-1], self.v[-1], self.dv[-1])

    @property
    def u1(self):
        return self.u[0]

    @property
    def u2(self):
        return self.u[-1]

    @property
    def v1(self):
        return self.v[0]

    @property
    def v2(self):
        return self.v[-1]

    @property
    def mu1(self):
        return self.du[0] / self.u[0]

    @property
    def mu2(self):
        return self.du[-1] / self.u[-1]

    @property
    def nu1(self):
        return self.dv[0] / self.v[0]

    @property
    def nu2(self):
        return self.dv[-1] / self.v[-1]

    def wronskian(self) -> np.ndarray:
        return self.u * self.dv - self.du * self.v

    def wronskian_drift(self) -> float:
        w = self.wronskian()
        return float(np.max(np.abs(w - w[0])) / abs(w[0]))

    def recombined(self, a, b, c, d) -> "SolutionPair":
        """The pair ``(a u + b v, c u + d v)``."""
        return SolutionPair(self.nodes, a * self.u + b * self.v, a * self.du + b * self.dv,
                            c * self.u + d * self.v, c * self.du + d * self.dv, self.step)


def integrate_solutions(potential, energy_ev: float, x_start: float | None = None,
                        x_end: float | None = None, step: float = _ode.DEFAULT_STEP,
                        tol: float = WRONSKIAN_TOL, max_halvings: int = 4) -> SolutionPair:
    """RK4 solutions of ``psi'' = (V - E) psi / c`` over the potential support.

    The step is halved until the Wronskian drift is below ``tol``.
    """
    if x_start is None or x_end is None:
        lo, hi = support(potential)
        x_start = lo if x_start is None else x_start
        x_end = hi if x_end is None else x_end
    if not x_end > x_start:
        raise ValueError("empty integration interval")
    k2 = energy_ev / UNITS.hbar2_over_2m
    h = step
    for _ in range(max_halvings + 1):
        nodes, (m11, m12, m21, m22) = _ode.sampled_solutions(potential, k2, x_start, x_end, h)
        pair = SolutionPair(nodes, m11, m21, m12, m22, h)
        drift = pair.wronskian_drift()
        if drift <= tol:
            return pair
        h /= 2
    raise StepTooCoarse(f"Wronskian drift {drift:.2e} above {tol:.0e} at step {h * 2:.2e} nm")


def gamma_from_solutions(pair: SolutionPair, k: complex):
    """``(Gamma11, Gamma12, Gamma21, Gamma22, Dt)`` of the vertex system."""
    u1, du1, v1, dv1, u2, du2, v2, dv2 = pair.endpoints
    dt = u1 * v2 - u2 * v1
    ik = 1j * k
    return (du1 * v2 - u2 * dv1 + ik * dt, u1 * dv1 - v1 * du1,
            dv2 * u2 - du2 * v2, du2 * v1 - u1 * dv2 + ik * dt, dt)


def _reduced_det(u1, du1, v1, dv1, u2, du2, v2, dv2, k):
    dt = u1 * v2 - u2 * v1
    ab = (du1 * v2 - u2 * dv1) + (du2 * v1 - u1 * dv2)
    return (du2 * dv1 - du1 * dv2) + 1j * k * ab - k * k * dt


def reduced_det(pair: SolutionPair, k: complex) -> complex:
    """``det Gamma / Dt`` without the division."""
    return _reduced_det(*pair.endpoints, k)


def amplitudes_from_solutions(pair: SolutionPair, k: float) -> ScatteringResult:
    """``t``, ``r`` referenced to the global origin of the support coordinate."""
    _, _, g21, g22, _ = gamma_from_solutions(pair, k)
    scale = max(abs(pair.u1), abs(pair.v1), abs(pair.u2), abs(pair.v2)) ** 2
    # Dt = 0 cancels between det Gamma and F, so only a vanishing Wronskian is fatal
    w = abs(pair.u1 * pair.dv[0] - pair.du[0] * pair.v1)
    if w < DEGENERATE_TOL * max(scale, 1.0):
        raise DegenerateBasis(f"Wronskian {w:.2e}: u and v are not independent")
    d = reduced_det(pair, k)
    x1, x2 = pair.x1, pair.x2
    t = -2j * k * cmath.exp(-1j * k * (x2 - x1)) * g21 / d
    r = (2j * k * g22 / d - 1) * cmath.exp(2j * k * x1)
    return ScatteringResult(complex(t), complex(r))


def amplitudes_log_derivative(pair: SolutionPair, k: float) -> ScatteringResult:
    """Same amplitudes written through the log-derivatives ``mu = u'/u``, ``nu = v'/v``.

    Needs ``u`` and ``v`` nonzero at both ends.
    """
    ik = 1j * k
    u1, u2, v1, v2 = pair.u1, pair.u2, pair.v1, pair.v2
    mu1, mu2, nu1, nu2 = pair.mu1, pair.mu2, pair.nu1, pair.nu2
    x1, x2 = pair.x1, pair.x2
    den_t = (u1 / u2) * (nu2 - ik) * (mu1 + ik) - (v1 / v2) * (nu1 + ik) * (mu2 - ik)
    t = 2 * ik * (nu2 - mu2) * cmath.exp(-ik * (x2 - x1)) / den_t
    num_r = u2 * v1 * (mu2 - ik) * (nu1 - ik) - u1 * v2 * (nu2 - ik) * (mu1 - ik)
    den_r = u1 * v2 * (nu2 - ik) * (mu1 + ik) - u2 * v1 * (nu1 + ik) * (mu2 - ik)
    r = num_r / den_r * cmath.exp(2 * ik * x1)
    return ScatteringResult(complex(t), complex(r))


def finite_support_amplitudes(potential, k: float, step: float = _ode.DEFAULT_STEP) -> ScatteringResult:
    return amplitudes_from_solutions(
        integrate_solutions(potential, UNITS.hbar2_over_2m * k * k, step=step), k)


# --- bound states -------------------------------------------------------------


@dataclass(frozen=True)
class BoundState:
    kappa: float
    n_wells: int = 1

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")

    @property
    def energy(self) -> float:
        return -UNITS.hbar2_over_2m * self.kappa ** 2


def bound_state_residual(potential, kappa, step: float = _ode.DEFAULT_STEP,
                         x_start: float | None = None, x_end: float | None = None) -> np.ndarray:
    """``det Gamma / Dt`` at ``k = i kappa`` for the basis ``u = (1, 0)``, ``v = (0, 1)``.

    Vectorised over ``kappa``; real-valued.
    """
    kappa = np.atleast_1d(np.asarray(kappa, dtype=float))
    if x_start is None or x_end is None:
        x_start, x_end = support(potential)
    p11, p12, p21, p22 = _ode.endpoint_propagators(potential, -kappa ** 2, x_start, x_end, step)
    res = _reduced_det(1.0, 0.0, 0.0, 1.0, p11, p21, p12, p22, 1j * kappa)
    if np.any(np.abs(res.imag) > 1e-8 * np.maximum(np.abs(res.real), 1.0)):
        raise VertexAmplitudeError("bound-state residual is not real")
    return res.real


def bisect_roots(fn, grid: np.ndarray, tol: float = KAPPA_TOL) -> np.ndarray:
    """All sign changes of vectorised ``fn`` on ``grid``, refined together by bisection."""
    vals = fn(grid)
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    exact = grid[vals == 0]
    lo, hi = grid[idx].copy(), grid[idx + 1].copy()
    flo = vals[idx].copy()
    while lo.size and np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        left = np.sign(fm) == np.sign(flo)
        lo = np.where(left, mid, lo)
        flo = np.where(left, fm, flo)
        hi = np.where(left, hi, mid)
    return np.sort(np.concatenate([0.5 * (lo + hi), exact]))


def find_bound_states(potential, kappa_range: tuple[float, float] | None = None,
                      n_scan: int = 2000, step: float = _ode.DEFAULT_STEP) -> list[BoundState]:
    """Bound states from sign changes of the residual on ``kappa_range``.

    The default range is ``(0, sqrt(-min V))``.
    """
    vmin = min_level_ev(potential)
    kmax = math.sqrt(-vmin / UNITS.hbar2_over_2m) if vmin < 0 else 0.0
    lo, hi = kappa_range if kappa_range is not None else (0.0, kmax)
    lo, hi = max(lo, 1e-9 * max(kmax, 1.0)), min(hi, kmax)
    if not hi > lo:
        return []
    grid = np.linspace(lo, hi, n_scan)
    roots = bisect_roots(lambda kap: bound_state_residual(potential, kap, step), grid)
    return [BoundState(float(kap)) for kap in roots[::-1]]


# --- parallel wells -------------------------------------------------------------


def well_q(k: complex, depth_ev: float) -> complex:
    return csqrt(k * k - depth_ev / UNITS.hbar2_over_2m)


def parallel_wells_amplitude(n: int, depth_ev: float, width: float, k: complex) -> complex:
    """``t_n = 2 i n k q / ((k^2 + n^2 q^2) sin ql + 2 i n k q cos ql)``."""
    if n < 1:
        raise ValueError("need at least one well")
    q = well_q(k, depth_ev)
    ql = q * width
    return 2j * n * k * q / ((k * k + n * n * q * q) * cmath.sin(ql) + 2j * n * k * q * cmath.cos(ql))


def parallel_wells_residual(n: int, depth_ev: float, width: float, kappa) -> np.ndarray:
    """Denominator of ``t_n(i kappa)`` divided by ``q``; real for ``kappa < sqrt(-V0)``."""
    kappa = np.asarray(kappa, dtype=float)
    q = np.sqrt(-depth_ev / UNITS.hbar2_over_2m - kappa ** 2)
    ql = q * width
    sinc = width * np.sinc(ql / np.pi)
    return (n * n * q * q - kappa ** 2) * sinc - 2 * n * kappa * np.cos(ql)


def parallel_wells_bound_states(n: int, depth_ev: float, width: float,
                                n_scan: int = 4000) -> list[BoundState]:
    if not depth_ev < 0:
        raise ValueError("wells need a negative depth")
    kmax = math.sqrt(-depth_ev / UNITS.hbar2_over_2m)
    grid = np.linspace(1e-9 * kmax, kmax * (1 - 1e-12), n_scan)
    roots = bisect_roots(lambda kap: parallel_wells_residual(n, depth_ev, width, kap), grid)
    return [BoundState(float(kap), n) for kap in roots[::-1]]


def parallel_wells_bound_state(n: int, depth_ev: float, width: float) -> BoundState:
    """Deepest bound state (largest ``kappa``) of ``n`` identical parallel wells."""
    states = parallel_wells_bound_states(n, depth_ev, width)
    if not states:
        raise VertexAmplitudeError("no bound state found")
    return states[0]


def tmin_estimate(n: int) -> float:
    """High-energy estimate ``4 n^2 / (1 + 4 n^2 + n^4)`` of the transmission minima."""
    return 4 * n * n / (1 + 4 * n * n + n ** 4)


def parallel_wells_tmin(n: int, depth_ev: float, width: float, s: int) -> float:
    """``T`` at the high-energy minimum ``k = (2s + 1) pi / width``."""
    return abs(parallel_wells_amplitude(n, depth_ev, width, (2 * s + 1) * math.pi / width)) ** 2
