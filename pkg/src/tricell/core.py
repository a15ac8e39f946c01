"""Geometry, parameters and the mutable particle state.

All quantities are in Lennard-Jones reduced units (epsilon = sigma = m = 1 by
default). Boxes are orthorhombic and periodic in every direction.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numba import njit


class ConfigurationError(ValueError):
    """Invalid geometry, grid or scenario configuration."""


class DomainError(ArithmeticError):
    """A potential was evaluated outside its domain (coincident particles)."""


class CutoffMode(str, enum.Enum):
    PAIR = "pair"
    PRODUCT = "product"


class Traversal(str, enum.Enum):
    C01 = "3c01"
    C18 = "3c18"
    C08 = "3c08"


@dataclass(frozen=True)
class Box:
    """Periodic orthorhombic simulation box."""

    lengths: tuple[float, float, float]

    def __post_init__(self):
        lengths = tuple(float(v) for v in np.broadcast_to(np.asarray(self.lengths, float), (3,)))
        if not all(np.isfinite(v) and v > 0 for v in lengths):
            raise ConfigurationError(f"box lengths must be positive and finite, got {lengths}")
        object.__setattr__(self, "lengths", lengths)

    @classmethod
    def cubic(cls, a: float) -> Box:
        return cls((a, a, a))

    @property
    def L(self) -> np.ndarray:
        return np.array(self.lengths)

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))

    def check_cutoff(self, r_c: float) -> None:
        """Raise unless every side admits the minimum-image convention at ``r_c``."""
        if min(self.lengths) < 2.0 * r_c:
            raise ConfigurationError(
                f"box {self.lengths} too small for cutoff {r_c}: need L >= 2 r_c on every axis"
            )


@dataclass(frozen=True)
class Params:
    epsilon: float = 1.0
    sigma: float = 1.0
    mass: float = 1.0
    nu: float = 0.072
    r_c: float = 2.5
    dt: float = 0.004
    T_target: float = 1.0
    cutoff_mode: CutoffMode = CutoffMode.PAIR
    traversal: Traversal = Traversal.C08

    def __post_init__(self):
        object.__setattr__(self, "cutoff_mode", CutoffMode(self.cutoff_mode))
        object.__setattr__(self, "traversal", Traversal(self.traversal))
        if not self.r_c > 0:
            raise ConfigurationError("r_c must be positive")
        if not self.dt > 0:
            raise ConfigurationError("dt must be positive")
        if self.nu < 0:
            raise ConfigurationError("nu must be non-negative")


@dataclass
class PhaseSpace:
    positions: np.ndarray
    velocities: np.ndarray
    box: Box
    mass: float = 1.0
    forces: np.ndarray = field(default=None)

    def __post_init__(self):
        self.positions = np.ascontiguousarray(self.positions, dtype=np.float64).reshape(-1, 3)
        n = len(self.positions)
        if self.velocities is None:
            self.velocities = np.zeros((n, 3))
        self.velocities = np.ascontiguousarray(self.velocities, dtype=np.float64).reshape(-1, 3)
        if self.forces is None:
            self.forces = np.zeros((n, 3))
        self.forces = np.ascontiguousarray(self.forces, dtype=np.float64).reshape(-1, 3)
        if not (len(self.velocities) == len(self.forces) == n):
            raise ValueError("positions, velocities and forces must have the same length")

    @property
    def N(self) -> int:
        return len(self.positions)

    @property
    def density(self) -> float:
        return self.N / self.box.volume

    def kinetic_energy(self) -> float:
        return 0.5 * self.mass * float(np.sum(self.velocities**2))

    def temperature(self) -> float:
        if self.N == 0:
            return 0.0
        return 2.0 * self.kinetic_energy() / (3.0 * self.N)

    def momentum(self) -> np.ndarray:
        return self.mass * self.velocities.sum(axis=0)

    def wrap(self) -> None:
        self.positions = wrap_position(self.positions, self.box)

    def copy(self) -> PhaseSpace:
        return PhaseSpace(self.positions.copy(), self.velocities.copy(), self.box, self.mass,
                          self.forces.copy())


def minimum_image(dr, box: Box) -> np.ndarray:
    """Nearest periodic image of displacement(s) ``dr``, components in [-L/2, L/2)."""
    L = box.L
    dr = np.asarray(dr, dtype=np.float64)
    return dr - L * np.floor(dr / L + 0.5)


def wrap_position(p, box: Box) -> np.ndarray:
    """Map position(s) into the primary cell [0, L) per axis."""
    L = box.L
    p = np.asarray(p, dtype=np.float64)
    w = p - L * np.floor(p / L)
    # p/L can underflow to -0.0, and p slightly below zero can round to L
    w = np.where(w < 0.0, w + L, w)
    return np.where(w >= L, w - L, w)


@njit(inline="always")
def mic(d, length):
    return d - length * np.floor(d / length + 0.5)


def save_snapshot(path, phase: PhaseSpace) -> None:
    """Write ``N Lx Ly Lz`` then one ``x y z vx vy vz`` line per particle."""
    Lx, Ly, Lz = phase.box.lengths
    with open(path, "w") as fh:
        fh.write(f"{phase.N} {Lx:.17g} {Ly:.17g} {Lz:.17g}\n")
        for p, v in zip(phase.positions, phase.velocities):
            fh.write(" ".join(f"{x:.17g}" for x in (*p, *v)) + "\n")


def load_snapshot(path, mass: float = 1.0) -> PhaseSpace:
    lines = Path(path).read_text().split("\n")
    head = lines[0].split()
    n = int(head[0])
    box = Box(tuple(float(x) for x in head[1:4]))
    data = np.loadtxt(lines[1:1 + n], ndmin=2) if n else np.zeros((0, 6))
    if data.shape != (n, 6):
        raise ValueError(f"snapshot {path}: expected {n} rows of 6 columns, got {data.shape}")
    return PhaseSpace(data[:, :3], data[:, 3:], box, mass)
