"""Brute-force reference forces, energies and virials.

Plain O(N^2) and O(N^3) loops over minimum-image distances. Only the
potential kernels are shared with the production path; cell membership,
when a restriction needs it, is recomputed here from scratch.

Restrictions on which triplets count (all combined with the cutoff rule):

``neighborhood_limited``
    the three particles' cells are pairwise adjacent (periodic Chebyshev
    distance at most one).
``cell_keys``
    the sorted cell triple, encoded ``c1*Nc^2 + c2*Nc + c3``, is in the given
    sorted array. Used for product-cutoff comparisons against Newton
    schedules.
``one_sided``
    each particle sees the triplets whose other two members lie in its own
    27-cell neighborhood and takes a third of their energy and virial and only
    its own force.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import CutoffMode, DomainError, Params, PhaseSpace, mic
from .potentials import atm_kernel, lj_kernel

MAX_N = 2000

_UNLIMITED, _ADJACENT, _KEYS, _ONE_SIDED = range(4)


@dataclass
class OracleResult:
    forces: np.ndarray
    E2: float
    E3: float
    W2: float
    W3: float
    accepted_triplets: int
    triplets: np.ndarray  # unique accepted triplets, sorted rows (i < j < k)


def _grid_shape(L, r_c):
    n = np.floor(L / r_c).astype(np.int64)
    return np.where(L / n < r_c, n - 1, n)


def _cell_coords(pos, L, n):
    c = np.floor(pos / (L / n)).astype(np.int64)
    return np.clip(c, 0, n - 1)


@njit(cache=True)
def _adjacent(ci, cj, n):
    for x in range(3):
        d = abs(ci[x] - cj[x])
        d = min(d, n[x] - d)
        if d > 1:
            return False
    return True


@njit(cache=True)
def _pairs(pos, L, rc2, eps, sig2, forces):
    N = pos.shape[0]
    E = 0.0
    W = 0.0
    for i in range(N):
        for j in range(i + 1, N):
            d = np.empty(3)
            r2 = 0.0
            for x in range(3):
                d[x] = mic(pos[i, x] - pos[j, x], L[x])
                r2 += d[x] * d[x]
            if r2 < 1e-24:
                return E, W, True
            if r2 <= rc2:
                u, fr = lj_kernel(r2, eps, sig2)
                E += u
                W += fr * r2
                for x in range(3):
                    forces[i, x] += fr * d[x]
                    forces[j, x] -= fr * d[x]
    return E, W, False


@njit(cache=True)
def _triplets(pos, L, cells, n, mode, keys, product, rc2, rc6, nu, forces, rec):
    N = pos.shape[0]
    nc = n[0] * n[1] * n[2]
    E = 0.0
    W = 0.0
    count = 0
    nrec = 0
    d = np.empty((N, N, 3))
    r2 = np.empty((N, N))
    for i in range(N):
        r2[i, i] = 0.0
        for j in range(i + 1, N):
            s = 0.0
            for x in range(3):
                v = mic(pos[i, x] - pos[j, x], L[x])
                d[i, j, x] = v
                d[j, i, x] = -v
                s += v * v
            if s < 1e-24:
                return E, W, count, nrec, True
            r2[i, j] = s
            r2[j, i] = s
    for i in range(N):
        for j in range(i + 1, N):
            for k in range(j + 1, N):
                a2 = r2[i, j]
                b2 = r2[i, k]
                c2 = r2[j, k]
                if product:
                    if a2 * b2 * c2 > rc6:
                        continue
                elif a2 > rc2 or b2 > rc2 or c2 > rc2:
                    continue
                if mode == _ADJACENT:
                    if not (_adjacent(cells[i], cells[j], n) and _adjacent(cells[i], cells[k], n)
                            and _adjacent(cells[j], cells[k], n)):
                        continue
                elif mode == _KEYS:
                    f = np.empty(3, np.int64)
                    for t, p in enumerate((i, j, k)):
                        f[t] = cells[p, 0] + n[0] * (cells[p, 1] + n[1] * cells[p, 2])
                    f.sort()
                    key = f[0] * nc * nc + f[1] * nc + f[2]
                    pos_k = np.searchsorted(keys, key)
                    if pos_k >= keys.shape[0] or keys[pos_k] != key:
                        continue
                u, ga, gb, gc = atm_kernel(a2, b2, c2, nu)
                w = -(ga * a2 + gb * b2 + gc * c2)
                if mode == _ONE_SIDED:
                    # centers whose neighborhood holds the other two members
                    seen = 0
                    if _adjacent(cells[i], cells[j], n) and _adjacent(cells[i], cells[k], n):
                        seen += 1
                        for x in range(3):
                            forces[i, x] -= ga * d[i, j, x] + gb * d[i, k, x]
                    if _adjacent(cells[j], cells[i], n) and _adjacent(cells[j], cells[k], n):
                        seen += 1
                        for x in range(3):
                            forces[j, x] -= -ga * d[i, j, x] + gc * d[j, k, x]
                    if _adjacent(cells[k], cells[i], n) and _adjacent(cells[k], cells[j], n):
                        seen += 1
                        for x in range(3):
                            forces[k, x] -= -gb * d[i, k, x] - gc * d[j, k, x]
                    if seen == 0:
                        continue
                    E += seen * u / 3.0
                    W += seen * w / 3.0
                    count += seen
                else:
                    for x in range(3):
                        fab = -ga * d[i, j, x]
                        fac = -gb * d[i, k, x]
                        fbc = -gc * d[j, k, x]
                        forces[i, x] += fab + fac
                        forces[j, x] += fbc - fab
                        forces[k, x] -= fac + fbc
                    E += u
                    W += w
                    count += 1
                if nrec < rec.shape[0]:
                    rec[nrec, 0] = i
                    rec[nrec, 1] = j
                    rec[nrec, 2] = k
                nrec += 1
    return E, W, count, nrec, False


def brute_force(phase: PhaseSpace, params: Params, neighborhood_limited: bool = False, *,
                cell_keys: np.ndarray | None = None, one_sided: bool = False,
                pairs: bool = True, triplets: bool = True, record: bool = False) -> OracleResult:
    """Reference evaluation over every particle pair and triplet.

    ``accepted_triplets`` counts contributions: distinct triplets, except in
    ``one_sided`` mode where each (center, triplet) visit counts once.
    """
    N = phase.N
    if N > MAX_N:
        raise ValueError(f"oracle refuses N={N} > {MAX_N}")
    if sum((neighborhood_limited, cell_keys is not None, one_sided)) > 1:
        raise ValueError("choose at most one triplet restriction")
    pos = np.ascontiguousarray(phase.positions, dtype=np.float64)
    L = phase.box.L
    n = _grid_shape(L, params.r_c)
    cells = _cell_coords(pos, L, n)
    mode = (_ADJACENT if neighborhood_limited else _KEYS if cell_keys is not None
            else _ONE_SIDED if one_sided else _UNLIMITED)
    keys = np.zeros(0, np.int64) if cell_keys is None else np.asarray(cell_keys, np.int64)
    forces = np.zeros((N, 3))
    rc = params.r_c
    E2 = W2 = 0.0
    if pairs:
        E2, W2, bad = _pairs(pos, L, rc * rc, params.epsilon, params.sigma**2, forces)
        if bad:
            raise DomainError("coincident particles")
    E3 = W3 = 0.0
    count = 0
    rec = np.zeros((0, 3), np.int64)
    if triplets and N >= 3:
        args = (pos, L, cells, n, mode, keys, params.cutoff_mode is CutoffMode.PRODUCT,
                rc * rc, rc**6, params.nu)
        f3 = np.zeros((N, 3))
        E3, W3, count, nrec, bad = _triplets(*args, f3, rec)
        if bad:
            raise DomainError("coincident particles")
        if record and nrec:
            f3[:] = 0.0
            rec = np.zeros((nrec, 3), np.int64)
            _triplets(*args, f3, rec)
        forces += f3
    return OracleResult(forces, float(E2), float(E3), float(W2), float(W3), int(count), rec)
