"""Initial conditions, velocity-Verlet integration and velocity rescaling."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import Box, ConfigurationError, PhaseSpace
from .traversal import ForceField, ForceResult


class ThermostatMode(str, enum.Enum):
    NONE = "none"
    RESCALE = "rescale"


@dataclass(frozen=True)
class Thermostat:
    T_target: float = 1.0
    mode: ThermostatMode = ThermostatMode.RESCALE

    def __post_init__(self):
        object.__setattr__(self, "mode", ThermostatMode(self.mode))
        if self.mode is ThermostatMode.RESCALE and not self.T_target > 0:
            raise ConfigurationError("rescaling thermostat needs T_target > 0")

    def apply(self, phase: PhaseSpace) -> None:
        if self.mode is ThermostatMode.RESCALE:
            rescale_thermostat(phase, self.T_target)


def init_lattice(N: int, box: Box) -> np.ndarray:
    """First ``N`` sites of an m^3 simple cubic lattice, m = ceil(N^(1/3)).

    Sites sit half a spacing in from the origin, x varying fastest.
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    if N == 0:
        return np.zeros((0, 3))
    m = math.ceil(round(N ** (1.0 / 3.0), 12))
    while m**3 < N:
        m += 1
    spacing = box.L / m
    k = np.arange(N)
    ijk = np.stack([k % m, (k // m) % m, k // (m * m)], axis=1)
    return (ijk + 0.5) * spacing


def init_velocities(N: int, T_target: float, seed: int, mass: float = 1.0) -> np.ndarray:
    """Maxwell-Boltzmann draw with zero net momentum and exactly ``T_target``."""
    if N < 2:
        raise ValueError("need at least two particles to remove momentum and keep kinetic energy")
    rng = np.random.default_rng(seed)
    v = rng.normal(0.0, math.sqrt(T_target / mass), size=(N, 3))
    v -= v.mean(axis=0)
    T = mass * np.sum(v * v) / (3.0 * N)
    return v * math.sqrt(T_target / T)


def rescale_thermostat(phase: PhaseSpace, T_target: float) -> None:
    T = phase.temperature()
    if not T > 0:
        raise ValueError("cannot rescale velocities with zero kinetic energy")
    phase.velocities *= math.sqrt(T_target / T)


def remove_momentum(phase: PhaseSpace) -> None:
    phase.velocities -= phase.velocities.mean(axis=0)


def step(phase: PhaseSpace, dt: float, field: ForceField, *, nu: float | None = None,
         thermostat: Thermostat | None = None) -> ForceResult:
    """One velocity-Verlet step; ``phase.forces`` must match the current positions."""
    inv_m = 1.0 / phase.mass
    phase.velocities += 0.5 * dt * inv_m * phase.forces
    phase.positions += dt * phase.velocities
    phase.wrap()
    result = field.compute(phase, nu=nu)
    phase.velocities += 0.5 * dt * inv_m * phase.forces
    if thermostat is not None:
        thermostat.apply(phase)
    return result
