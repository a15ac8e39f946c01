import numpy as np
import pytest

from tricell import Box, ForceField, Params, PhaseSpace
from tricell.core import ConfigurationError
from tricell.dynamics import (
    Thermostat,
    ThermostatMode,
    init_lattice,
    init_velocities,
    remove_momentum,
    rescale_thermostat,
    step,
)


def _system(N=300, rho=0.65, T=1.0, seed=3):
    box = Box.cubic((N / rho) ** (1 / 3))
    phase = PhaseSpace(init_lattice(N, box), init_velocities(N, T, seed), box)
    return phase, ForceField(box, Params())


def test_lattice_fills_box_without_overlap():
    box = Box((10.0, 12.0, 14.0))
    pos = init_lattice(1000, box)
    assert pos.shape == (1000, 3)
    assert np.all(pos > 0) and np.all(pos < box.L)
    assert np.allclose(pos[0], box.L / 20)
    # 1001 needs the next cube up
    assert len(np.unique(init_lattice(1001, box).round(9), axis=0)) == 1001
    assert init_lattice(0, box).shape == (0, 3)


def test_velocities_exact_temperature_zero_momentum():
    v = init_velocities(500, 1.033, seed=9)
    assert np.abs(v.sum(axis=0)).max() < 1e-12
    assert np.sum(v * v) / (3 * 500) == pytest.approx(1.033, rel=1e-13)
    assert np.array_equal(v, init_velocities(500, 1.033, seed=9))
    assert not np.array_equal(v, init_velocities(500, 1.033, seed=10))
    with pytest.raises(ValueError):
        init_velocities(1, 1.0, 0)


def test_rescale_and_momentum():
    phase, _ = _system()
    phase.velocities *= 2.0
    phase.velocities += 0.3
    remove_momentum(phase)
    assert np.abs(phase.momentum()).max() < 1e-10
    rescale_thermostat(phase, 0.7)
    assert phase.temperature() == pytest.approx(0.7, rel=1e-13)
    phase.velocities[:] = 0.0
    with pytest.raises(ValueError):
        rescale_thermostat(phase, 1.0)


def test_thermostat_modes():
    phase, _ = _system()
    before = phase.velocities.copy()
    Thermostat(2.0, ThermostatMode.NONE).apply(phase)
    assert np.array_equal(before, phase.velocities)
    Thermostat(2.0, "rescale").apply(phase)
    assert phase.temperature() == pytest.approx(2.0)
    with pytest.raises(ConfigurationError):
        Thermostat(0.0)


def test_verlet_is_time_reversible():
    phase, field = _system(T=0.8)
    field.compute(phase)
    start = phase.positions.copy()
    for _ in range(40):
        step(phase, 0.004, field)
    phase.velocities *= -1
    for _ in range(40):
        step(phase, 0.004, field)
    d = phase.positions - start
    d -= phase.box.L * np.round(d / phase.box.L)
    assert np.abs(d).max() < 1e-9


def test_nve_energy_is_conserved():
    phase, field = _system(T=0.8)
    field.compute(phase)
    for _ in range(100):  # leave the lattice first
        step(phase, 0.004, field, thermostat=Thermostat(0.8))
    totals = []
    for _ in range(300):
        r = step(phase, 0.002, field)
        totals.append((r.potential + phase.kinetic_energy()) / phase.N)
    totals = np.array(totals)
    # unshifted truncation makes small jumps at the cutoff; no systematic drift
    assert totals.std() < 2e-3
    assert abs(totals[-1] - totals[0]) < 5e-3


def test_thermostatted_step_hits_target():
    phase, field = _system(T=1.5)
    field.compute(phase)
    step(phase, 0.004, field, thermostat=Thermostat(1.033))
    assert phase.temperature() == pytest.approx(1.033, rel=1e-12)
    assert np.all((phase.positions >= 0) & (phase.positions < phase.box.L))
