"""Geometries, single-emitter states and separable ensembles.

Positions are stored in units of the inverse transition wavenumber, i.e. every
coordinate is already ``k * r``.  A far-field phase is then simply
``direction.unit @ position``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidGeometry, InvalidParameter

__all__ = [
    "Geometry",
    "WaveDirection",
    "EmitterState",
    "ProductState",
    "DetectionPlan",
    "direction",
    "make_chain",
    "make_ring",
    "make_random_sphere",
    "structure_factor",
    "css_state",
    "steady_state",
    "population_state",
    "read_geometry_csv",
    "write_geometry_csv",
    "XorShift64Star",
]

UNIT_TOL = 1e-12
POSITIVITY_TOL = 1e-12


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class WaveDirection:
    """Unit far-field direction; the wavevector is ``k * unit``."""

    unit: np.ndarray

    def __post_init__(self):
        u = _frozen(self.unit)
        if u.shape != (3,) or not np.all(np.isfinite(u)):
            raise InvalidParameter(f"direction must be a finite 3-vector, got {self.unit!r}")
        if abs(np.linalg.norm(u) - 1.0) > UNIT_TOL:
            raise InvalidParameter(f"direction {u} is not a unit vector")
        object.__setattr__(self, "unit", u)

    @classmethod
    def along(cls, vec) -> "WaveDirection":
        v = np.asarray(vec, dtype=float)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise InvalidParameter("cannot normalise the zero vector")
        return cls(v / norm)

    @classmethod
    def from_angles(cls, polar: float, azimuth: float = 0.0) -> "WaveDirection":
        """Spherical angles measured from +z; ``azimuth`` from +x towards +y.

        Polar angles outside [0, pi] are allowed so that in-plane angles such
        as 3*pi/2 (pointing along -x for azimuth 0) can be written directly.
        """
        st = math.sin(polar)
        return cls((st * math.cos(azimuth), st * math.sin(azimuth), math.cos(polar)))

    def __eq__(self, other):
        return isinstance(other, WaveDirection) and np.array_equal(self.unit, other.unit)

    def __hash__(self):
        return hash(self.unit.tobytes())


def direction(polar: float, azimuth: float = 0.0) -> WaveDirection:
    return WaveDirection.from_angles(polar, azimuth)


X_HAT = WaveDirection((1.0, 0.0, 0.0))
Y_HAT = WaveDirection((0.0, 1.0, 0.0))
Z_HAT = WaveDirection((0.0, 0.0, 1.0))


@dataclass(frozen=True)
class Geometry:
    positions: np.ndarray  # (n, 3), dimensionless k*r

    def __post_init__(self):
        pos = _frozen(self.positions)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise InvalidGeometry(f"positions must have shape (n, 3), got {pos.shape}")
        if pos.shape[0] < 2:
            raise InvalidGeometry("a geometry needs at least two emitters")
        if not np.all(np.isfinite(pos)):
            raise InvalidGeometry("positions must be finite")
        object.__setattr__(self, "positions", pos)

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    def phases(self, k: WaveDirection) -> np.ndarray:
        """``k . r_p`` for every emitter."""
        return self.positions @ k.unit

    def __eq__(self, other):
        return isinstance(other, Geometry) and np.array_equal(self.positions, other.positions)

    def __hash__(self):
        return hash(self.positions.tobytes())


@dataclass(frozen=True)
class EmitterState:
    """2x2 single-emitter density matrix, parametrised by ``ee`` and ``eg``."""

    ee: float
    eg: complex = 0j

    def __post_init__(self):
        ee = float(self.ee)
        eg = complex(self.eg)
        if not (0.0 <= ee <= 1.0):
            raise InvalidParameter(f"excited population {ee} outside [0, 1]")
        if abs(eg) ** 2 > ee * (1.0 - ee) + POSITIVITY_TOL:
            raise InvalidParameter(f"coherence {eg} violates positivity for ee={ee}")
        object.__setattr__(self, "ee", ee)
        object.__setattr__(self, "eg", eg)

    @property
    def gg(self) -> float:
        return 1.0 - self.ee

    @property
    def ge(self) -> complex:
        return self.eg.conjugate()

    def matrix(self) -> np.ndarray:
        """Matrix in the (g, e) = (bit 0, bit 1) basis, ``m[i, j] = <i|rho|j>``."""
        return np.array([[self.gg, self.ge], [self.eg, self.ee]], dtype=complex)

    def purity(self) -> float:
        return self.ee ** 2 + self.gg ** 2 + 2.0 * abs(self.eg) ** 2

    def is_pure(self, tol: float = POSITIVITY_TOL) -> bool:
        return abs(abs(self.eg) ** 2 - self.ee * self.gg) <= tol


@dataclass(frozen=True)
class ProductState:
    geometry: Geometry
    emitters: tuple

    def __post_init__(self):
        emitters = tuple(self.emitters)
        if len(emitters) != self.geometry.n:
            raise InvalidParameter(
                f"{len(emitters)} emitter states for {self.geometry.n} positions"
            )
        if not all(isinstance(e, EmitterState) for e in emitters):
            raise InvalidParameter("emitters must be EmitterState instances")
        object.__setattr__(self, "emitters", emitters)

    @property
    def n(self) -> int:
        return self.geometry.n

    @property
    def ee(self) -> np.ndarray:
        return np.array([e.ee for e in self.emitters])

    @property
    def eg(self) -> np.ndarray:
        return np.array([e.eg for e in self.emitters], dtype=complex)

    def is_pure(self) -> bool:
        return all(e.is_pure() for e in self.emitters)


@dataclass(frozen=True)
class DetectionPlan:
    """Ordered far-field directions of the detected photons."""

    directions: tuple = ()

    def __post_init__(self):
        dirs = tuple(self.directions)
        if not all(isinstance(d, WaveDirection) for d in dirs):
            raise InvalidParameter("detection directions must be WaveDirection instances")
        object.__setattr__(self, "directions", dirs)

    @classmethod
    def repeated(cls, k: WaveDirection, nu: int) -> "DetectionPlan":
        if nu < 0:
            raise InvalidParameter(f"photon count must be >= 0, got {nu}")
        return cls((k,) * nu)

    @property
    def nu(self) -> int:
        return len(self.directions)

    def check_against(self, n: int) -> None:
        if self.nu > n - 1:
            raise InvalidParameter(f"cannot detect {self.nu} photons from {n} emitters (max {n - 1})")


# -- geometries ---------------------------------------------------------------


def make_chain(n: int, step: float, axis: WaveDirection = Z_HAT) -> Geometry:
    if n < 2:
        raise InvalidGeometry(f"chain needs n >= 2, got {n}")
    if not step > 0:
        raise InvalidGeometry(f"chain step must be positive, got {step}")
    p = np.arange(n, dtype=float)
    return Geometry(step * p[:, None] * axis.unit[None, :])


def make_ring(n: int, radius: float, plane=((1.0, 0.0, 0.0), (0.0, 0.0, 1.0))) -> Geometry:
    """Ring of ``n`` equally spaced emitters; the default plane is xz."""
    if n < 2:
        raise InvalidGeometry(f"ring needs n >= 2, got {n}")
    if not radius > 0:
        raise InvalidGeometry(f"ring radius must be positive, got {radius}")
    e1, e2 = (np.asarray(v, dtype=float) for v in plane)
    if e1.shape != (3,) or e2.shape != (3,):
        raise InvalidGeometry("plane vectors must be 3-vectors")
    if (
        abs(e1 @ e1 - 1.0) > UNIT_TOL
        or abs(e2 @ e2 - 1.0) > UNIT_TOL
        or abs(e1 @ e2) > UNIT_TOL
    ):
        raise InvalidGeometry("plane vectors must be orthonormal")
    ang = 2.0 * np.pi * np.arange(n) / n
    return Geometry(radius * (np.cos(ang)[:, None] * e1 + np.sin(ang)[:, None] * e2))


class XorShift64Star:
    """xorshift64* generator seeded through one splitmix64 step.

    State update ``x ^= x >> 12; x ^= x << 25; x ^= x >> 27`` and output
    ``x * 0x2545F4914F6CDD1D mod 2**64``.  Doubles in [0, 1) take the top 53
    bits.  Pure integer arithmetic, so streams are identical on every platform.
    """

    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        z = (seed + 0x9E3779B97F4A7C15) & self.MASK
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self.MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self.MASK
        z ^= z >> 31
        self.state = z or 0x9E3779B97F4A7C15

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & self.MASK
        x ^= x >> 27
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & self.MASK

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))


def make_random_sphere(n: int, radius: float, seed: int) -> Geometry:
    """``n`` points uniformly distributed in a ball, reproducible from ``seed``."""
    if n < 2:
        raise InvalidGeometry(f"sphere cloud needs n >= 2, got {n}")
    if not radius > 0:
        raise InvalidGeometry(f"sphere radius must be positive, got {radius}")
    rng = XorShift64Star(seed)
    pts = np.empty((n, 3))
    for i in range(n):
        u1, u2, u3 = rng.random(), rng.random(), rng.random()
        r = radius * u1 ** (1.0 / 3.0)
        cos_t = 1.0 - 2.0 * u2
        sin_t = math.sqrt(max(0.0, 1.0 - cos_t * cos_t))
        phi = 2.0 * math.pi * u3
        pts[i] = (r * sin_t * math.cos(phi), r * sin_t * math.sin(phi), r * cos_t)
    return Geometry(pts)


def structure_factor(geometry: Geometry, delta) -> float:
    """``|sum_p exp(-i delta . r_p)|^2 - n``; negative under destructive interference."""
    if isinstance(delta, WaveDirection):
        delta = delta.unit
    delta = np.asarray(delta, dtype=float)
    amp = np.exp(-1j * (geometry.positions @ delta)).sum()
    return float(amp.real ** 2 + amp.imag ** 2 - geometry.n)


# -- initial states -----------------------------------------------------------


def _check_angle(name: str, value: float) -> None:
    if not (0.0 <= value <= math.pi):
        raise InvalidParameter(f"{name} must lie in [0, pi], got {value}")


def css_state(theta: float, k_L: WaveDirection, geometry: Geometry) -> ProductState:
    _check_angle("theta", theta)
    ee = math.sin(theta / 2.0) ** 2
    amp = math.sin(theta) / 2.0
    phases = geometry.phases(k_L)
    return ProductState(
        geometry, tuple(EmitterState(ee, amp * np.exp(1j * ph)) for ph in phases)
    )


def steady_state(s: float, k_L: WaveDirection, geometry: Geometry) -> ProductState:
    """Laser-driven steady state at saturation ``s``; ``s = inf`` is fully mixed."""
    if math.isnan(s) or s < 0:
        raise InvalidParameter(f"saturation parameter must be >= 0, got {s}")
    if math.isinf(s):
        return ProductState(geometry, (EmitterState(0.5, 0j),) * geometry.n)
    ee = s / (2.0 * (1.0 + s))
    amp = math.sqrt(s / 2.0) / (1.0 + s)
    phases = geometry.phases(k_L)
    return ProductState(
        geometry, tuple(EmitterState(ee, 1j * amp * np.exp(1j * ph)) for ph in phases)
    )


def population_state(theta_bar: float, geometry: Geometry) -> ProductState:
    _check_angle("theta_bar", theta_bar)
    ee = math.sin(theta_bar / 2.0) ** 2
    return ProductState(geometry, (EmitterState(ee, 0j),) * geometry.n)


# -- CSV ----------------------------------------------------------------------


def write_geometry_csv(geometry: Geometry, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "x", "y", "z"])
        for i, (x, y, z) in enumerate(geometry.positions):
            w.writerow([i, repr(float(x)), repr(float(y)), repr(float(z))])


def read_geometry_csv(path) -> Geometry:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or set(rows[0]) != {"index", "x", "y", "z"}:
        raise InvalidGeometry(f"{path}: expected header index,x,y,z")
    rows.sort(key=lambda r: int(r["index"]))
    if [int(r["index"]) for r in rows] != list(range(len(rows))):
        raise InvalidGeometry(f"{path}: indices must run 0..n-1")
    return Geometry([[float(r["x"]), float(r["y"]), float(r["z"])] for r in rows])
