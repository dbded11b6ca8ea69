"""Domain types, units and 2x2 complex-matrix primitives.

Conventions used throughout the package:

* lengths in nm, energies in eV, wave numbers in nm^-1;
* every edge carries the free-electron mass, so ``E = HBAR2_OVER_2M * k**2``;
* complex square roots take the branch with non-negative imaginary part.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

HBAR2_OVER_2M = 0.0380998  # eV nm^2, free-electron mass

SINGULAR_DET = 1e-300


class VertexAmplitudeError(Exception):
    """Base class for numerical failures raised by this package."""


class SingularMatrix(VertexAmplitudeError):
    pass


class NegativeEnergy(VertexAmplitudeError, ValueError):
    pass


@dataclass(frozen=True)
class Units:
    hbar2_over_2m: float = HBAR2_OVER_2M

    def ev_to_inv_nm2(self, energy_ev: float) -> float:
        return energy_ev / self.hbar2_over_2m

    def inv_nm2_to_ev(self, value: float) -> float:
        return value * self.hbar2_over_2m


UNITS = Units()


def ev_to_k(energy_ev: float) -> float:
    """Wave number (nm^-1) of a free electron with kinetic energy ``energy_ev``."""
    if not energy_ev > 0:
        raise NegativeEnergy(f"energy must be positive, got {energy_ev!r}")
    return math.sqrt(energy_ev / UNITS.hbar2_over_2m)


def k_to_ev(k: float) -> float:
    return UNITS.hbar2_over_2m * k * k


def potential_to_inv_nm2(u_ev: float) -> float:
    """Convert a potential energy in eV to the ``2 m U / hbar^2`` scale (nm^-2)."""
    return UNITS.ev_to_inv_nm2(u_ev)


def csqrt(z: complex) -> complex:
    """Square root on the branch ``Im >= 0`` (decaying evanescent waves)."""
    w = cmath.sqrt(z)
    if w.imag < 0 or (w.imag == 0 and w.real < 0):
        w = -w
    return w


@dataclass(frozen=True)
class ComplexMat2:
    """Immutable 2x2 complex matrix ``[[m11, m12], [m21, m22]]``."""

    m11: complex
    m12: complex
    m21: complex
    m22: complex

    def __post_init__(self):
        for name in ("m11", "m12", "m21", "m22"):
            v = complex(getattr(self, name))
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError(f"non-finite matrix entry {name}={v!r}")
            object.__setattr__(self, name, v)

    @classmethod
    def identity(cls) -> "ComplexMat2":
        return cls(1, 0, 0, 1)

    @classmethod
    def diag(cls, a: complex, d: complex) -> "ComplexMat2":
        return cls(a, 0, 0, d)

    @classmethod
    def from_array(cls, a) -> "ComplexMat2":
        a = np.asarray(a)
        return cls(a[0, 0], a[0, 1], a[1, 0], a[1, 1])

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]], dtype=complex)

    def det(self) -> complex:
        return self.m11 * self.m22 - self.m12 * self.m21

    def __matmul__(self, other: "ComplexMat2") -> "ComplexMat2":
        return mat2_mul(self, other)

    def apply(self, x: complex, y: complex) -> tuple[complex, complex]:
        return self.m11 * x + self.m12 * y, self.m21 * x + self.m22 * y

    def scale(self, s: complex) -> "ComplexMat2":
        return ComplexMat2(s * self.m11, s * self.m12, s * self.m21, s * self.m22)

    def norm(self) -> float:
        return max(abs(self.m11), abs(self.m12), abs(self.m21), abs(self.m22))


def mat2_mul(a: ComplexMat2, b: ComplexMat2) -> ComplexMat2:
    return ComplexMat2(
        a.m11 * b.m11 + a.m12 * b.m21,
        a.m11 * b.m12 + a.m12 * b.m22,
        a.m21 * b.m11 + a.m22 * b.m21,
        a.m21 * b.m12 + a.m22 * b.m22,
    )


def mat2_inv(a: ComplexMat2) -> ComplexMat2:
    d = a.det()
    if abs(d) <= SINGULAR_DET:
        raise SingularMatrix(f"|det| = {abs(d):.3e} below threshold")
    return ComplexMat2(a.m22 / d, -a.m12 / d, -a.m21 / d, a.m11 / d)


# --- potentials ------------------------------------------------------------


class PotentialKind(str, Enum):
    FREE = "free"
    SQUARE_WELL = "square_well"
    SQUARE_BARRIER = "square_barrier"
    TABULATED = "tabulated"
    COMPOSITE_RING = "composite_ring"


@dataclass(frozen=True)
class Free:
    kind = PotentialKind.FREE
    width = 0.0

    def value_ev(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class SquareWell:
    """Constant potential ``depth_ev`` (< 0) on ``[0, width]``."""

    depth_ev: float
    width: float
    kind = PotentialKind.SQUARE_WELL

    def __post_init__(self):
        if not self.depth_ev < 0:
            raise ValueError("SquareWell depth must be negative (eV)")
        if not self.width > 0:
            raise ValueError("width must be positive")

    @property
    def level_ev(self) -> float:
        return self.depth_ev

    def value_ev(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= 0) & (x <= self.width), self.level_ev, 0.0)


@dataclass(frozen=True)
class SquareBarrier:
    height_ev: float
    width: float
    kind = PotentialKind.SQUARE_BARRIER

    def __post_init__(self):
        if not self.height_ev > 0:
            raise ValueError("SquareBarrier height must be positive (eV)")
        if not self.width > 0:
            raise ValueError("width must be positive")

    @property
    def level_ev(self) -> float:
        return self.height_ev

    def value_ev(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= 0) & (x <= self.width), self.level_ev, 0.0)


@dataclass(frozen=True, eq=False)
class Tabulated:
    """Samples of V (eV) on a uniform, strictly increasing grid ``xi`` (nm).

    The potential is linearly interpolated between samples and zero outside
    ``[xi[0], xi[-1]]``; the support starts at local coordinate ``xi[0]``.
    """

    xi: np.ndarray
    v_ev: np.ndarray
    kind = PotentialKind.TABULATED

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float)
        v = np.asarray(self.v_ev, dtype=float)
        if xi.ndim != 1 or xi.shape != v.shape or xi.size < 2:
            raise ValueError("xi and v_ev must be 1-D arrays of equal length >= 2")
        dx = np.diff(xi)
        if np.any(dx <= 0):
            raise ValueError("xi must be strictly increasing")
        if not np.allclose(dx, dx[0], rtol=1e-9, atol=1e-12):
            raise ValueError("xi must be a uniform grid")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "v_ev", v)

    @property
    def width(self) -> float:
        return float(self.xi[-1] - self.xi[0])

    def value_ev(self, x):
        x = np.asarray(x, dtype=float)
        return np.interp(x, self.xi, self.v_ev, left=0.0, right=0.0)

    @classmethod
    def from_file(cls, path) -> "Tabulated":
        """Read two whitespace-separated columns ``xi_nm  V_eV``; ``#`` comments allowed."""
        data = np.loadtxt(path, comments="#", ndmin=2)
        if data.shape[1] != 2:
            raise ValueError(f"{path}: expected two columns, got {data.shape[1]}")
        return cls(data[:, 0], data[:, 1])


@dataclass(frozen=True)
class CompositeRing:
    """A scatterer known only through its amplitudes at one wave number.

    ``t``/``r`` describe incidence from the left.  The right-incidence pair
    defaults to the same values, which holds for a reciprocal element that is
    mirror-symmetric about its centre (a ring without flux).
    """

    k: float
    t: complex
    r: complex
    t_right: complex | None = None
    r_right: complex | None = None
    kind = PotentialKind.COMPOSITE_RING
    width = 0.0


PotentialDescriptor = Free | SquareWell | SquareBarrier | Tabulated | CompositeRing


@dataclass(frozen=True)
class EdgeSpec:
    """One edge of a two-terminal graph, oriented from the in- to the out-vertex.

    ``offset`` is the position of the potential's support start along the edge;
    ``None`` centres it.  ``ab_sign`` fixes the orientation of the flux phase.
    """

    length: float
    potential: PotentialDescriptor = field(default_factory=Free)
    ab_sign: int = 0
    offset: float | None = None

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError(f"edge length must be positive, got {self.length!r}")
        if self.ab_sign not in (-1, 0, 1):
            raise ValueError("ab_sign must be -1, 0 or +1")
        w = self.potential.width
        if w > self.length * (1 + 1e-12):
            raise ValueError("potential support is wider than the edge")
        if isinstance(self.potential, Tabulated):
            start = self.support_start
            if not (start > 0 and start + w < self.length):
                raise ValueError("tabulated support must lie strictly inside the edge")

    @property
    def is_free(self) -> bool:
        return isinstance(self.potential, Free)

    @property
    def support_start(self) -> float:
        if self.offset is not None:
            return float(self.offset)
        return 0.5 * (self.length - self.potential.width)


class ScatteringPreset(str, Enum):
    """Boundary data of the external leads (in-lead ``a e^{ikx} + b e^{-ikx}``)."""

    LEFT = "left"
    RIGHT = "right"
    JOST1 = "jost1"
    JOST2 = "jost2"


@dataclass(frozen=True)
class TwoTerminalGraph:
    edges: tuple[EdgeSpec, ...]
    flux_alpha: float = 0.0
    boundary: ScatteringPreset = ScatteringPreset.LEFT

    def __post_init__(self):
        edges = tuple(self.edges)
        object.__setattr__(self, "edges", edges)
        if len(edges) < 1:
            raise ValueError("a two-terminal graph needs at least one edge")
        if self.flux_alpha != 0.0:
            if len(edges) != 2:
                raise ValueError("flux is only defined for the two-arm ring")
            if any(e.ab_sign == 0 for e in edges):
                raise ValueError("ring arms need ab_sign = +1/-1 when flux is set")

    @classmethod
    def ring(cls, l1: float, l2: float, alpha: float = 0.0,
             boundary: ScatteringPreset = ScatteringPreset.LEFT) -> "TwoTerminalGraph":
        """Two free arms; with flux the upper arm gets ``+1`` and the lower ``-1``."""
        s1, s2 = (1, -1) if alpha != 0.0 else (0, 0)
        return cls((EdgeSpec(l1, ab_sign=s1), EdgeSpec(l2, ab_sign=s2)), alpha, boundary)

    @classmethod
    def parallel_wells(cls, n: int, depth_ev: float, width: float,
                       boundary: ScatteringPreset = ScatteringPreset.LEFT) -> "TwoTerminalGraph":
        """``n`` identical edges, each entirely filled by a square well."""
        if n < 1:
            raise ValueError("need at least one well")
        edge = EdgeSpec(width, SquareWell(depth_ev, width), offset=0.0)
        return cls((edge,) * n, 0.0, boundary)

    def with_boundary(self, boundary: ScatteringPreset) -> "TwoTerminalGraph":
        return TwoTerminalGraph(self.edges, self.flux_alpha, boundary)


@dataclass(frozen=True)
class ScatteringResult:
    t: complex
    r: complex

    @property
    def T(self) -> float:
        return abs(self.t) ** 2

    @property
    def R(self) -> float:
        return abs(self.r) ** 2
