import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tricell import Box, ConfigurationError, Params, PhaseSpace, load_snapshot, minimum_image, save_snapshot, wrap_position


def test_box_rejects_nonpositive():
    with pytest.raises(ConfigurationError):
        Box((1.0, 0.0, 1.0))
    with pytest.raises(ConfigurationError):
        Box.cubic(float("nan"))


def test_cutoff_check():
    Box.cubic(5.0).check_cutoff(2.5)
    with pytest.raises(ConfigurationError):
        Box.cubic(4.9).check_cutoff(2.5)


def test_minimum_image_examples():
    box = Box.cubic(10.0)
    assert np.allclose(minimum_image([6.0, -6.0, 4.0], box), [-4.0, 4.0, 4.0])
    assert np.allclose(minimum_image([5.0, 0.0, 0.0], box), [-5.0, 0.0, 0.0])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3))
def test_minimum_image_range_and_equivalence(d):
    box = Box((10.0, 7.5, 12.5))
    m = minimum_image(d, box)
    L = box.L
    assert np.all(m >= -L / 2 - 1e-9) and np.all(m < L / 2 + 1e-9)
    k = (np.asarray(d) - m) / L
    assert np.allclose(k, np.round(k), atol=1e-6)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1e4, 1e4), min_size=3, max_size=3))
def test_wrap_position_in_primary_cell(p):
    box = Box((10.0, 7.5, 12.5))
    w = wrap_position(p, box)
    assert np.all(w >= 0) and np.all(w < box.L)


def test_wrap_tiny_negative():
    box = Box.cubic(10.0)
    w = wrap_position([-1e-17, 0.0, 0.0], box)
    assert 0.0 <= w[0] < 10.0


def test_params_validation():
    with pytest.raises(ConfigurationError):
        Params(r_c=0)
    with pytest.raises(ValueError):
        Params(traversal="3c27")
    assert Params(cutoff_mode="product").cutoff_mode.value == "product"


def test_phase_space_temperature_and_momentum():
    v = np.array([[1.0, 0, 0], [-1.0, 0, 0]])
    ph = PhaseSpace(np.zeros((2, 3)), v, Box.cubic(5.0))
    assert ph.kinetic_energy() == pytest.approx(1.0)
    assert ph.temperature() == pytest.approx(1.0 / 3.0)
    assert np.allclose(ph.momentum(), 0.0)


def test_snapshot_round_trip(tmp_path, rng):
    box = Box((10.0, 11.0, 12.0))
    ph = PhaseSpace(rng.random((7, 3)) * 10, rng.normal(size=(7, 3)), box)
    save_snapshot(tmp_path / "s.snap", ph)
    back = load_snapshot(tmp_path / "s.snap")
    assert back.box == box
    assert np.array_equal(back.positions, ph.positions)
    assert np.array_equal(back.velocities, ph.velocities)
