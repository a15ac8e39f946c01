import numpy as np
import pytest

from tricell import Box, ConfigurationError, PhaseSpace, bin_particles, build_grid, forward_neighbors, neighbor
from tricell.cells import FORWARD_OFFSETS, forward_offsets, is_forward, offsets


def test_grid_dimensions():
    g = build_grid(Box.cubic(12.5), 2.5)
    assert g.n == (5, 5, 5)
    assert np.allclose(g.cell_len, 2.5)
    g = build_grid(Box((37.5, 12.6, 7.6)), 2.5)
    assert g.n == (15, 5, 3)
    assert np.all(g.cell_len >= 2.5)


def test_grid_too_small():
    with pytest.raises(ConfigurationError):
        build_grid(Box.cubic(7.4), 2.5)


def test_forward_offsets():
    assert len(FORWARD_OFFSETS) == 13
    assert len(forward_offsets(2)) == 4
    for o in offsets(3):
        if any(o):
            assert is_forward(o) != is_forward(tuple(-c for c in o))
    assert not is_forward((0, 0, 0))


def test_forward_neighbors_flat_order_in_interior():
    g = build_grid(Box.cubic(25.0), 2.5)
    base = g.index((5, 5, 5))
    flats = [ci.flat for ci, shift in forward_neighbors(base, g)]
    assert flats == sorted(flats)
    assert all(f > base.flat for f in flats)


def test_neighbor_shift_across_boundary():
    g = build_grid(Box.cubic(12.5), 2.5)
    ci, shift = neighbor(g.index((0, 0, 0)), (-1, 0, 0), g)
    assert ci.coords == (4, 0, 0)
    assert np.allclose(shift, [-12.5, 0, 0])
    ci, shift = neighbor(g.index((4, 4, 4)), (1, 1, 1), g)
    assert ci.flat == 0
    assert np.allclose(shift, [12.5, 12.5, 12.5])


def test_binning(rng):
    box = Box.cubic(12.5)
    ph = PhaseSpace(rng.random((500, 3)) * 12.5, None, box)
    ph.positions[0] = [12.5 - 1e-15, 0.0, 0.0]
    g = build_grid(box, 2.5)
    bin_particles(g, ph)
    assert g.occupancy.sum() == 500
    members = np.sort(np.concatenate(g.bins))
    assert np.array_equal(members, np.arange(500))
    for c, parts in enumerate(g.bins):
        assert np.all(np.diff(parts) > 0)
        lo = np.array(g.coords_of(c)) * g.cell_len
        inside = (ph.positions[parts] >= lo - 1e-12) & (ph.positions[parts] <= lo + g.cell_len + 1e-12)
        assert inside.all()


def test_minimum_image_flag():
    assert build_grid(Box.cubic(12.5), 2.5).needs_minimum_image
    assert not build_grid(Box.cubic(15.0), 2.5).needs_minimum_image
