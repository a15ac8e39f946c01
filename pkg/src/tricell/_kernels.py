"""Compiled per-task force loops.

A task gathers the particles of its local cells (base first, then the
template offsets) into contiguous arrays with periodic shifts applied,
precomputes every local squared distance once, then runs the one-, two- and
three-cell routines over that table. Newton tasks scatter forces back to all
local particles; one-sided tasks write only to base-cell particles.

Per-task accumulators:
    energy[t] = (E2, E3, W2, W3)
    counts[t] = (triplets traversed, triplets accepted, pairs traversed, pairs accepted)
"""

import numpy as np
from numba import njit, prange

from .potentials import atm_kernel, lj_kernel

TINY_R2 = 1e-24

ERR_NONE = 0
ERR_COINCIDENT = 1


@njit(inline="always")
def _wrap(v, length, use_mic):
    # shifted-frame displacements stay within one box length
    if use_mic:
        if v >= 0.5 * length:
            v -= length
        elif v < -0.5 * length:
            v += length
    return v


@njit(inline="always")
def _disp(lp, a, b, Lx, Ly, Lz, use_mic):
    return (_wrap(lp[a, 0] - lp[b, 0], Lx, use_mic),
            _wrap(lp[a, 1] - lp[b, 1], Ly, use_mic),
            _wrap(lp[a, 2] - lp[b, 2], Lz, use_mic))


@njit(inline="always")
def _lj_block(a0, a1, b0, b1, same, lp, Lx, Ly, Lz, use_mic, r2, lf, rc2, eps, sig2):
    """LJ over a x b (or a < b inside one cell); returns (E, W, accepted)."""
    E = 0.0
    W = 0.0
    acc = 0
    for a in range(a0, a1):
        for b in range(a + 1 if same else b0, b1):
            rr = r2[a, b]
            if rr <= rc2:
                acc += 1
                u, fr = lj_kernel(rr, eps, sig2)
                dx, dy, dz = _disp(lp, a, b, Lx, Ly, Lz, use_mic)
                lf[a, 0] += fr * dx
                lf[a, 1] += fr * dy
                lf[a, 2] += fr * dz
                lf[b, 0] -= fr * dx
                lf[b, 1] -= fr * dy
                lf[b, 2] -= fr * dz
                E += u
                W += fr * rr
    return E, W, acc


@njit(inline="always")
def _atm_block(a0, a1, b0, b1, c0, c1, ab_same, bc_same, lp, Lx, Ly, Lz, use_mic, r2, lf, buf, product,
               rc2, rc6, nu, idx, rec, rec_n):
    """ATM over one routine's candidates; returns (E, W, accepted).

    ``ab_same`` / ``bc_same`` mark a range shared with the previous one, in
    which case the index must grow so each triplet is met once.
    """
    E = 0.0
    W = 0.0
    acc = 0
    for a in range(a0, a1):
        # third members near a; under the pair rule no other c can pass
        nc = 0
        for c in range(c0, c1):
            if product or r2[a, c] <= rc2:
                buf[nc] = c
                nc += 1
        for b in range(a + 1 if ab_same else b0, b1):
            a2 = r2[a, b]
            if not product and a2 > rc2:
                continue
            for t in range(nc):
                c = buf[t]
                if bc_same and c <= b:
                    continue
                b2 = r2[a, c]
                c2 = r2[b, c]
                if product:
                    if a2 * b2 * c2 > rc6:
                        continue
                elif c2 > rc2:
                    continue
                acc += 1
                u, ga, gb, gc = atm_kernel(a2, b2, c2, nu)
                ab = _disp(lp, a, b, Lx, Ly, Lz, use_mic)
                ac = _disp(lp, a, c, Lx, Ly, Lz, use_mic)
                bc = _disp(lp, b, c, Lx, Ly, Lz, use_mic)
                for x in range(3):
                    fab = -ga * ab[x]
                    fac = -gb * ac[x]
                    fbc = -gc * bc[x]
                    lf[a, x] += fab + fac
                    lf[b, x] += fbc - fab
                    lf[c, x] -= fac + fbc
                E += u
                W -= ga * a2 + gb * b2 + gc * c2
                if rec.shape[0] > 0:
                    k = rec_n[0]
                    if k < rec.shape[0]:
                        rec[k, 0] = idx[a]
                        rec[k, 1] = idx[b]
                        rec[k, 2] = idx[c]
                    rec_n[0] = k + 1
    return E, W, acc


@njit(inline="always")
def _c2(n):
    return n * (n - 1) // 2


@njit(inline="always")
def _c3(n):
    return n * (n - 1) * (n - 2) // 6


@njit
def _gather(base, pos, L, n, cell_start, cell_particles, offsets, use_mic):
    K = offsets.shape[0]
    bx = base % n[0]
    by = (base // n[0]) % n[1]
    bz = base // (n[0] * n[1])
    cells = np.empty(K, np.int64)
    shifts = np.zeros((K, 3))
    lstart = np.empty(K + 1, np.int64)
    lstart[0] = 0
    for l in range(K):
        raw = (bx + offsets[l, 0], by + offsets[l, 1], bz + offsets[l, 2])
        w = np.empty(3, np.int64)
        for x in range(3):
            q = raw[x] // n[x]
            w[x] = raw[x] - q * n[x]
            shifts[l, x] = q * L[x]
        c = w[0] + n[0] * (w[1] + n[1] * w[2])
        cells[l] = c
        lstart[l + 1] = lstart[l] + cell_start[c + 1] - cell_start[c]
    M = lstart[K]
    idx = np.empty(M, np.int64)
    lp = np.empty((M, 3))
    m = 0
    for l in range(K):
        c = cells[l]
        for t in range(cell_start[c], cell_start[c + 1]):
            p = cell_particles[t]
            idx[m] = p
            for x in range(3):
                lp[m, x] = pos[p, x] + shifts[l, x]
            m += 1
    r2 = np.empty((M, M))
    Lx, Ly, Lz = L[0], L[1], L[2]
    err = ERR_NONE
    for a in range(M):
        r2[a, a] = 0.0
        ax, ay, az = lp[a, 0], lp[a, 1], lp[a, 2]
        for b in range(a + 1, M):
            dx = _wrap(ax - lp[b, 0], Lx, use_mic)
            dy = _wrap(ay - lp[b, 1], Ly, use_mic)
            dz = _wrap(az - lp[b, 2], Lz, use_mic)
            s = dx * dx + dy * dy + dz * dz
            r2[a, b] = s
            r2[b, a] = s
            if s < TINY_R2:
                err = ERR_COINCIDENT
    return idx, lstart, lp, r2, err


@njit
def task_newton(base, pos, L, n, cell_start, cell_particles, offsets, singles, pairs, triplets,
                do_pairs, do_triplets, product, rc2, rc6, eps, sig2, nu, use_mic,
                forces, energy, counts, rec, rec_n):
    idx, lstart, lp, r2, err = _gather(base, pos, L, n, cell_start, cell_particles, offsets, use_mic)
    if err != ERR_NONE:
        return err
    M = idx.shape[0]
    Lx, Ly, Lz = L[0], L[1], L[2]
    lf = np.zeros((M, 3))
    buf = np.empty(M, np.int64)
    E2 = W2 = E3 = W3 = 0.0
    acc2 = acc3 = 0
    trav2 = trav3 = 0

    for s in singles:
        s0 = lstart[s]
        s1 = lstart[s + 1]
        if do_pairs:
            trav2 += _c2(s1 - s0)
            e, w, k = _lj_block(s0, s1, s0, s1, True, lp, Lx, Ly, Lz, use_mic, r2, lf, rc2, eps, sig2)
            E2 += e
            W2 += w
            acc2 += k
        if do_triplets:
            trav3 += _c3(s1 - s0)
            e, w, k = _atm_block(s0, s1, s0, s1, s0, s1, True, True, lp, Lx, Ly, Lz, use_mic, r2, lf, buf, product, rc2,
                                 rc6, nu, idx, rec, rec_n)
            E3 += e
            W3 += w
            acc3 += k

    for i in range(pairs.shape[0]):
        p0 = lstart[pairs[i, 0]]
        p1 = lstart[pairs[i, 0] + 1]
        q0 = lstart[pairs[i, 1]]
        q1 = lstart[pairs[i, 1] + 1]
        if do_pairs:
            trav2 += (p1 - p0) * (q1 - q0)
            e, w, k = _lj_block(p0, p1, q0, q1, False, lp, Lx, Ly, Lz, use_mic, r2, lf, rc2, eps, sig2)
            E2 += e
            W2 += w
            acc2 += k
        if do_triplets:
            trav3 += _c2(p1 - p0) * (q1 - q0) + (p1 - p0) * _c2(q1 - q0)
            # two particles in the first cell, one in the second
            e, w, k = _atm_block(p0, p1, p0, p1, q0, q1, True, False, lp, Lx, Ly, Lz, use_mic, r2, lf, buf, product, rc2,
                                 rc6, nu, idx, rec, rec_n)
            E3 += e
            W3 += w
            acc3 += k
            # one particle in the first cell, two in the second
            e, w, k = _atm_block(p0, p1, q0, q1, q0, q1, False, True, lp, Lx, Ly, Lz, use_mic, r2, lf, buf, product, rc2,
                                 rc6, nu, idx, rec, rec_n)
            E3 += e
            W3 += w
            acc3 += k

    if do_triplets:
        for i in range(triplets.shape[0]):
            p0 = lstart[triplets[i, 0]]
            p1 = lstart[triplets[i, 0] + 1]
            q0 = lstart[triplets[i, 1]]
            q1 = lstart[triplets[i, 1] + 1]
            t0 = lstart[triplets[i, 2]]
            t1 = lstart[triplets[i, 2] + 1]
            trav3 += (p1 - p0) * (q1 - q0) * (t1 - t0)
            e, w, k = _atm_block(p0, p1, q0, q1, t0, t1, False, False, lp, Lx, Ly, Lz, use_mic, r2, lf, buf, product, rc2,
                                 rc6, nu, idx, rec, rec_n)
            E3 += e
            W3 += w
            acc3 += k

    energy[0] += E2
    energy[1] += E3
    energy[2] += W2
    energy[3] += W3
    counts[0] += trav3
    counts[1] += acc3
    counts[2] += trav2
    counts[3] += acc2
    for m in range(M):
        p = idx[m]
        for x in range(3):
            forces[p, x] += lf[m, x]
    return ERR_NONE


@njit
def task_one_sided(base, pos, L, n, cell_start, cell_particles, offsets,
                   do_pairs, do_triplets, product, rc2, rc6, eps, sig2, nu, use_mic,
                   forces, energy, counts, rec, rec_n):
    """Every neighborhood pair and triplet seen from each base particle; writes base only.

    Each unordered pair is met twice and each triplet up to three times over
    the whole sweep, so energies and virials are weighted 1/2 and 1/3.
    """
    idx, lstart, lp, r2, err = _gather(base, pos, L, n, cell_start, cell_particles, offsets, use_mic)
    if err != ERR_NONE:
        return err
    M = idx.shape[0]
    Lx, Ly, Lz = L[0], L[1], L[2]
    nb = lstart[1]
    third = 1.0 / 3.0
    E2 = W2 = E3 = W3 = 0.0
    acc2 = acc3 = 0
    for a in range(nb):
        fx = 0.0
        fy = 0.0
        fz = 0.0
        if do_pairs:
            for b in range(M):
                rr = r2[a, b]
                if b == a or rr > rc2:
                    continue
                acc2 += 1
                u, fr = lj_kernel(rr, eps, sig2)
                dx, dy, dz = _disp(lp, a, b, Lx, Ly, Lz, use_mic)
                fx += fr * dx
                fy += fr * dy
                fz += fr * dz
                E2 += u
                W2 += fr * rr
        if do_triplets:
            for b in range(M):
                a2 = r2[a, b]
                if b == a or (not product and a2 > rc2):
                    continue
                for c in range(b + 1, M):
                    b2 = r2[a, c]
                    c2 = r2[b, c]
                    if c == a:
                        continue
                    if product:
                        if a2 * b2 * c2 > rc6:
                            continue
                    elif b2 > rc2 or c2 > rc2:
                        continue
                    acc3 += 1
                    u, ga, gb, gc = atm_kernel(a2, b2, c2, nu)
                    ab = _disp(lp, a, b, Lx, Ly, Lz, use_mic)
                    ac = _disp(lp, a, c, Lx, Ly, Lz, use_mic)
                    fx -= ga * ab[0] + gb * ac[0]
                    fy -= ga * ab[1] + gb * ac[1]
                    fz -= ga * ab[2] + gb * ac[2]
                    E3 += u
                    W3 -= ga * a2 + gb * b2 + gc * c2
                    if rec.shape[0] > 0:
                        k = rec_n[0]
                        if k < rec.shape[0]:
                            rec[k, 0] = idx[a]
                            rec[k, 1] = idx[b]
                            rec[k, 2] = idx[c]
                        rec_n[0] = k + 1
        p = idx[a]
        forces[p, 0] += fx
        forces[p, 1] += fy
        forces[p, 2] += fz
    energy[0] += 0.5 * E2
    energy[1] += third * E3
    energy[2] += 0.5 * W2
    energy[3] += third * W3
    if do_triplets:
        counts[0] += nb * _c2(M - 1)
        counts[1] += acc3
    if do_pairs:
        counts[2] += nb * (M - 1)
        counts[3] += acc2
    return ERR_NONE


@njit(parallel=True, cache=True)
def sweep(pos, L, n, cell_start, cell_particles, offsets, singles, pairs, triplets, newton,
          color_ptr, color_tasks, do_pairs, do_triplets, product, rc2, rc6, eps, sig2, nu,
          use_mic, forces, energy, counts, errors, rec, rec_n):
    """Run all colors in order; tasks of one color run concurrently."""
    for col in range(color_ptr.shape[0] - 1):
        for t in prange(color_ptr[col], color_ptr[col + 1]):
            base = color_tasks[t]
            if newton:
                errors[t] = task_newton(base, pos, L, n, cell_start, cell_particles, offsets,
                                        singles, pairs, triplets, do_pairs, do_triplets, product,
                                        rc2, rc6, eps, sig2, nu, use_mic, forces, energy[t],
                                        counts[t], rec, rec_n)
            else:
                errors[t] = task_one_sided(base, pos, L, n, cell_start, cell_particles, offsets,
                                           do_pairs, do_triplets, product, rc2, rc6, eps, sig2,
                                           nu, use_mic, forces, energy[t], counts[t], rec, rec_n)
