import math

import numpy as np
import pytest

from conftest import random_phase
from tricell import Box, Params, PhaseSpace
from tricell.observables import (
    RDF,
    DensityProfile,
    FitError,
    Side,
    ThermoSample,
    fit_interface,
    fit_slab,
    instantaneous_pressure,
    lrc_homogeneous,
    pressure,
    read_thermo,
    slab_center,
    tanh_profile,
    write_fits,
    write_thermo,
)


def test_tail_correction_matches_quadrature():
    rho, rc = 0.65, 2.5
    r = np.linspace(rc, 400.0, 2_000_001)
    u = 4.0 * (r**-12 - r**-6)
    du = 4.0 * (-12 * r**-13 + 6 * r**-7)
    e_ref = 2 * math.pi * rho * np.trapezoid(u * r**2, r)
    p_ref = -2 / 3 * math.pi * rho**2 * np.trapezoid(du * r**3, r)
    e, p = lrc_homogeneous(rho, rc, Params())
    assert e == pytest.approx(e_ref, rel=1e-6)
    assert p == pytest.approx(p_ref, rel=1e-6)
    assert e == pytest.approx(-0.34803, abs=1e-5)


def test_pressure_ideal_gas_limit():
    assert instantaneous_pressure(100, 50.0, 2.0, 0.0, 0.0) == pytest.approx(4.0)
    assert instantaneous_pressure(100, 50.0, 2.0, 30.0, 15.0, 0.5) == pytest.approx(4.8)
    samples = [ThermoSample(i, 0, 0, 0, T, 0, W, 0) for i, (T, W) in enumerate([(1.0, 3.0), (3.0, 9.0)])]
    assert pressure(samples, 10.0, 5) == pytest.approx(5 * 2.0 / 10 + 6.0 / 30)
    with pytest.raises(ValueError):
        pressure([], 1.0, 1)


def test_thermo_csv_round_trip(tmp_path):
    s = [ThermoSample(3, -4.1 / 3, 0.1 / 7, 1.5, 1.0, 0.109, -1234.5678901234567, 1e-17)]
    write_thermo(tmp_path / "t.csv", s)
    assert read_thermo(tmp_path / "t.csv") == s


def test_rdf_of_ideal_gas_is_flat():
    phase = random_phase(1500, 0.3, seed=11)
    hist = RDF(phase.box, bins=50)
    for seed in range(4):
        hist.accumulate(random_phase(1500, 0.3, seed=seed))
    r, g = hist.finalize(phase.density, phase.N)
    assert len(r) == 50 and r[-1] < hist.r_max
    assert np.mean(g[10:]) == pytest.approx(1.0, abs=0.02)
    with pytest.raises(ValueError):
        RDF(phase.box).finalize(0.3, 1500)


def test_rdf_counts_each_pair_twice():
    box = Box.cubic(10.0)
    phase = PhaseSpace([[1.0, 1, 1], [2.05, 1, 1], [9.5, 1, 1]], None, box)
    hist = RDF(box, r_max=2.0, bins=20)
    hist.accumulate(phase)
    assert hist.counts.sum() == 4.0
    assert hist.counts[10] == 2.0 and hist.counts[15] == 2.0


def test_density_profile_total_mass():
    phase = random_phase(2000, 0.4, seed=2)
    prof = DensityProfile(phase.box, axis=2, bins=30)
    prof.accumulate(phase)
    z, rho = prof.finalize()
    assert np.sum(rho) * prof.bin_volume == pytest.approx(2000)
    assert np.mean(rho) == pytest.approx(0.4)


@pytest.mark.parametrize("side", list(Side))
def test_noiseless_fit_round_trip(side):
    z = np.linspace(0, 20, 300)
    truth = (0.70, 0.015, 9.3, 1.9)
    fit = fit_interface(z, tanh_profile(z, *truth, side), side)
    got = (fit.rho_l, fit.rho_g, fit.z0, fit.d)
    for a, b in zip(got, truth):
        assert a == pytest.approx(b, rel=1e-8)
    assert fit.side is Side(side)


def test_profile_orientation():
    z = np.array([-50.0, 50.0])
    assert tanh_profile(z, 1.0, 0.0, 0.0, 1.0, Side.LEFT).tolist() == [0.0, 1.0]
    assert tanh_profile(z, 1.0, 0.0, 0.0, 1.0, Side.RIGHT).tolist() == [1.0, 0.0]


def test_flat_profile_is_rejected():
    z = np.linspace(0, 10, 100)
    with pytest.raises(FitError):
        fit_interface(z, np.full_like(z, 0.5), Side.LEFT)


def test_slab_fit_handles_wrapped_slab(tmp_path):
    Lz, nb = 60.0, 600
    z = (np.arange(nb) + 0.5) * Lz / nb
    zc, half = 1.0, 11.0  # liquid straddles the boundary
    sd = (z - zc + Lz / 2) % Lz - Lz / 2
    rho = 0.36 - 0.34 * np.tanh(2 * (np.abs(sd) - half) / 2.0)
    left, right = (zc - half) % Lz, zc + half
    assert slab_center(z, rho, Lz) == pytest.approx(zc, abs=1e-6)
    fl, fr = fit_slab(z, rho, Lz)
    assert fl.z0 == pytest.approx(left, abs=1e-3) and fr.z0 == pytest.approx(right, abs=1e-3)
    assert fl.rho_l == pytest.approx(0.7, rel=1e-4) and fr.d == pytest.approx(2.0, rel=1e-3)
    write_fits(tmp_path / "fit.csv", (fl, fr))
    text = (tmp_path / "fit.csv").read_text()
    assert "left" in text and "tanh(2(z-z0)/d)" in text
