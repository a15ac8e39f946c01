"""Lennard-Jones and Axilrod-Teller-Muto potentials, forces and cutoff tests.

The public functions here are readable scalar references. The compiled force
loops use :func:`lj_kernel` and :func:`atm_kernel`, which work on squared
distances and return ``(du/dr)/r`` so forces follow from displacement vectors
without extra square roots.

Conventions: ``r_ab = p_a - p_b``. The primitive force on ``a`` due to ``b``
inside a triplet is ``F_a(b) = -(du/dr_ab) * r_ab / |r_ab|``; the composite
forces are

    F_i = F_i(j)k + F_i(k)j
    F_j = -F_i(j)k + F_j(k)i
    F_k = -F_i(k)j - F_j(k)i

so the three always sum to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import Box, CutoffMode, DomainError, Params, minimum_image

MIN_DISTANCE = 1e-12


def _check_distance(*rs):
    for r in rs:
        if not r > MIN_DISTANCE:
            raise DomainError(f"distance {r!r} below {MIN_DISTANCE}: coincident particles")


def lj_energy_force(r2: float, params: Params = Params()) -> tuple[float, float]:
    """Truncated, unshifted 12-6 potential at squared distance ``r2``.

    Returns ``(u, f_over_r)`` with the force on ``i`` from ``j`` equal to
    ``f_over_r * (p_i - p_j)``.
    """
    if not r2 > MIN_DISTANCE**2:
        raise DomainError(f"squared distance {r2!r}: coincident particles")
    return lj_kernel(float(r2), params.epsilon, params.sigma**2)


def cutoff_accept(geometry, r_c: float, mode) -> bool:
    """Whether a triplet survives truncation; the boundary itself is accepted.

    ``geometry`` is a :class:`TripletGeometry` or a ``(r_ij, r_ik, r_jk)`` tuple.
    """
    if isinstance(geometry, TripletGeometry):
        r_ij, r_ik, r_jk = geometry.r_ij, geometry.r_ik, geometry.r_jk
    else:
        r_ij, r_ik, r_jk = geometry
    if CutoffMode(mode) is CutoffMode.PAIR:
        return max(r_ij, r_ik, r_jk) <= r_c
    return r_ij * r_ik * r_jk <= r_c**3


def atm_energy(r_ij: float, r_ik: float, r_jk: float, nu: float) -> float:
    _check_distance(r_ij, r_ik, r_jk)
    a2, b2, c2 = r_ij * r_ij, r_ik * r_ik, r_jk * r_jk
    prod = r_ij * r_ik * r_jk
    cosines = (-a2 + b2 + c2) * (a2 - b2 + c2) * (a2 + b2 - c2)
    return nu * (1.0 / prod**3 + 3.0 * cosines / (8.0 * prod**5))


def _datm(a: float, b: float, c: float, nu: float) -> float:
    # derivative w.r.t. the first side; the expression is symmetric in b and c
    return 3.0 * nu * (
        -1.0 / (a**4 * b**3 * c**3)
        - 1.0 / (8.0 * b**5 * c**5)
        + 5.0 * b / (8.0 * a**6 * c**5)
        + 5.0 * c / (8.0 * a**6 * b**5)
        - 1.0 / (8.0 * a**2 * b**3 * c**5)
        - 1.0 / (8.0 * a**2 * b**5 * c**3)
        - 3.0 / (8.0 * a**4 * b * c**5)
        - 3.0 / (8.0 * a**4 * b**5 * c)
        - 5.0 / (8.0 * a**6 * b * c**3)
        - 5.0 / (8.0 * a**6 * b**3 * c)
        + 6.0 / (8.0 * a**4 * b**3 * c**3)
    )


def atm_gradient(r_ij: float, r_ik: float, r_jk: float, nu: float) -> tuple[float, float, float]:
    """Partial derivatives of :func:`atm_energy` with respect to each side."""
    _check_distance(r_ij, r_ik, r_jk)
    return (
        _datm(r_ij, r_ik, r_jk, nu),
        _datm(r_ik, r_jk, r_ij, nu),
        _datm(r_jk, r_ij, r_ik, nu),
    )


@dataclass(frozen=True)
class TripletGeometry:
    r_ij: float
    r_ik: float
    r_jk: float
    e_ij: np.ndarray
    e_ik: np.ndarray
    e_jk: np.ndarray

    @classmethod
    def from_positions(cls, p_i, p_j, p_k, box: Box | None = None) -> TripletGeometry:
        d = [np.asarray(a, float) - np.asarray(b, float) for a, b in ((p_i, p_j), (p_i, p_k), (p_j, p_k))]
        if box is not None:
            d = [minimum_image(x, box) for x in d]
        r = [float(np.sqrt(x @ x)) for x in d]
        _check_distance(*r)
        return cls(r[0], r[1], r[2], d[0] / r[0], d[1] / r[1], d[2] / r[2])


@dataclass(frozen=True)
class ForceTriple:
    F_i: np.ndarray
    F_j: np.ndarray
    F_k: np.ndarray
    f_ij: np.ndarray  # on i due to j
    f_ik: np.ndarray  # on i due to k
    f_jk: np.ndarray  # on j due to k

    def virial(self, geometry: TripletGeometry) -> float:
        g = geometry
        return float(g.r_ij * g.e_ij @ self.f_ij + g.r_ik * g.e_ik @ self.f_ik + g.r_jk * g.e_jk @ self.f_jk)


def force_triple(p_i, p_j, p_k, box: Box | None, params: Params) -> tuple[ForceTriple, float]:
    g = TripletGeometry.from_positions(p_i, p_j, p_k, box)
    d_ij, d_ik, d_jk = atm_gradient(g.r_ij, g.r_ik, g.r_jk, params.nu)
    f_ij = -d_ij * g.e_ij
    f_ik = -d_ik * g.e_ik
    f_jk = -d_jk * g.e_jk
    forces = ForceTriple(f_ij + f_ik, -f_ij + f_jk, -f_ik - f_jk, f_ij, f_ik, f_jk)
    return forces, atm_energy(g.r_ij, g.r_ik, g.r_jk, params.nu)


# -- compiled kernels ---------------------------------------------------------


@njit(inline="always")
def lj_kernel(r2, eps, sig2):
    sr2 = sig2 / r2
    sr6 = sr2 * sr2 * sr2
    u = 4.0 * eps * (sr6 * sr6 - sr6)
    f_over_r = 24.0 * eps * (2.0 * sr6 * sr6 - sr6) / r2
    return u, f_over_r


@njit(inline="always")
def _atm_poly(a2, b2, c2):
    return (a2 * a2 * a2 + a2 * a2 * b2 + a2 * a2 * c2 + 3.0 * a2 * b2 * b2 + 2.0 * a2 * b2 * c2
            + 3.0 * a2 * c2 * c2 - 5.0 * b2 * b2 * b2 + 5.0 * b2 * b2 * c2 + 5.0 * b2 * c2 * c2
            - 5.0 * c2 * c2 * c2)


@njit(inline="always")
def atm_kernel(a2, b2, c2, nu):
    """Energy and ``(du/dr)/r`` per side from squared sides ``(ij, ik, jk)``."""
    s = a2 * b2 * c2
    inv = 1.0 / math.sqrt(s)
    inv2 = inv * inv
    inv5 = inv2 * inv2 * inv
    cos3 = (-a2 + b2 + c2) * (a2 - b2 + c2) * (a2 + b2 - c2)
    u = nu * inv5 * (s + 0.375 * cos3)
    pre = -0.375 * nu * inv5
    ga = pre * _atm_poly(a2, b2, c2) / a2
    gb = pre * _atm_poly(b2, a2, c2) / b2
    gc = pre * _atm_poly(c2, a2, b2) / c2
    return u, ga, gb, gc
