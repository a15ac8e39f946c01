import math

import numpy as np
import pytest

from tricell import Box, DomainError, Params, TripletGeometry, atm_energy, atm_gradient, cutoff_accept, force_triple, lj_energy_force
from tricell.potentials import atm_kernel


def test_equilateral_energy():
    assert atm_energy(1.0, 1.0, 1.0, 0.072) == pytest.approx(0.099, rel=1e-14)


def test_collinear_energy_is_negative():
    # cos terms of a straight line: 1, 1, -1
    u = atm_energy(1.0, 1.0, 2.0, 1.0)
    assert u == pytest.approx((1 - 3) / 8.0, rel=1e-14)


def test_homogeneous_degree_minus_nine(rng):
    for _ in range(50):
        a, b, c = _triangle(rng)
        s = rng.uniform(0.5, 2.0)
        assert atm_energy(s * a, s * b, s * c, 0.3) == pytest.approx(s**-9 * atm_energy(a, b, c, 0.3), rel=1e-12)


def _triangle(rng):
    p = rng.normal(size=(3, 3))
    return (np.linalg.norm(p[0] - p[1]), np.linalg.norm(p[0] - p[2]), np.linalg.norm(p[1] - p[2]))


def test_gradient_matches_central_differences(rng):
    for _ in range(200):
        sides = np.array(_triangle(rng)) + 0.5
        g = atm_gradient(*sides, 0.072)
        for k in range(3):
            h = 1e-6 * sides[k]
            up, dn = sides.copy(), sides.copy()
            up[k] += h
            dn[k] -= h
            fd = (atm_energy(*up, 0.072) - atm_energy(*dn, 0.072)) / (2 * h)
            assert g[k] == pytest.approx(fd, rel=1e-6, abs=1e-12)


def test_compiled_kernel_agrees_with_reference(rng):
    for _ in range(200):
        a, b, c = _triangle(rng)
        u, ga, gb, gc = atm_kernel(a * a, b * b, c * c, 0.072)
        da, db, dc = atm_gradient(a, b, c, 0.072)
        assert u == pytest.approx(atm_energy(a, b, c, 0.072), rel=1e-12)
        for g, d, r in ((ga, da, a), (gb, db, b), (gc, dc, c)):
            assert g * r == pytest.approx(d, rel=1e-10, abs=1e-14)


def test_force_triple_newton_and_virial(rng):
    p = Params()
    for _ in range(100):
        pts = rng.normal(size=(3, 3))
        f, u = force_triple(*pts, None, p)
        assert np.abs(f.F_i + f.F_j + f.F_k).max() <= 1e-12 * max(1.0, np.abs(f.F_i).max())
        g = TripletGeometry.from_positions(*pts)
        assert f.virial(g) == pytest.approx(9 * u, rel=1e-10)


def test_force_is_negative_energy_gradient(rng):
    p = Params(nu=0.5)
    pts = rng.normal(size=(3, 3))
    f, _ = force_triple(*pts, None, p)
    h = 1e-6
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        up = TripletGeometry.from_positions(pts[0] + e, pts[1], pts[2])
        dn = TripletGeometry.from_positions(pts[0] - e, pts[1], pts[2])
        fd = -(atm_energy(up.r_ij, up.r_ik, up.r_jk, 0.5) - atm_energy(dn.r_ij, dn.r_ik, dn.r_jk, 0.5)) / (2 * h)
        assert f.F_i[k] == pytest.approx(fd, rel=1e-5, abs=1e-8)


def test_geometry_uses_minimum_image():
    box = Box.cubic(10.0)
    g = TripletGeometry.from_positions([0.5, 0, 0], [9.5, 0, 0], [0.5, 1.0, 0], box)
    assert g.r_ij == pytest.approx(1.0)
    assert g.r_jk == pytest.approx(math.sqrt(2.0))


def test_coincident_particles_raise():
    with pytest.raises(DomainError):
        atm_energy(0.0, 1.0, 1.0, 0.072)
    with pytest.raises(DomainError):
        TripletGeometry.from_positions([1, 1, 1], [1, 1, 1], [0, 0, 0])
    with pytest.raises(DomainError):
        lj_energy_force(0.0)


def test_lj_minimum_and_zero():
    u, f = lj_energy_force(2 ** (1 / 3))
    assert u == pytest.approx(-1.0)
    assert f == pytest.approx(0.0, abs=1e-12)
    u, _ = lj_energy_force(1.0)
    assert u == 0.0


def test_cutoff_boundaries():
    assert cutoff_accept((2.5, 2.5, 2.5), 2.5, "pair")
    assert not cutoff_accept((2.5, 2.5, 2.5000001), 2.5, "pair")
    assert cutoff_accept((1.0, 2.5, 6.25), 2.5, "product")
    assert not cutoff_accept((1.0, 2.5, 6.26), 2.5, "product")


def test_pair_acceptance_implies_product(rng):
    for _ in range(500):
        sides = tuple(rng.uniform(0.5, 3.0, 3))
        if cutoff_accept(sides, 2.5, "pair"):
            assert cutoff_accept(sides, 2.5, "product")
