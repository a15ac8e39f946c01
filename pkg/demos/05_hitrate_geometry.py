# Hitrate from template geometry alone.
#
# For uniform particles with mean cell occupancy m, a task's expected
# candidate count is m^3 * (1/6 per single + 1 per base pair + 1 per cell
# triplet), up to O(m^2) terms. Sampling points in each template's cells gives
# the acceptance probability per template, hence the expected hitrate,
# without running the force kernel at all. Compare with the measured value on
# a random 37000-particle box.

import numpy as np

from tricell import Box, ForceField, Params, PhaseSpace, hitrate
from tricell.cells import build_grid
from tricell.traversal import make_schedule

rng = np.random.default_rng(0)
S = 200_000  # samples per template; cells have unit side = r_c


def accept_rate(cells, product):
    a, b, c = (np.asarray(x) + rng.random((S, 3)) for x in cells)
    ab, ac, bc = (np.linalg.norm(p - q, axis=1) for p, q in ((a, b), (a, c), (b, c)))
    ok = ab * ac * bc <= 1.0 if product else np.maximum(np.maximum(ab, ac), bc) <= 1.0
    return ok.mean()


def predicted(kind, product):
    s = make_schedule(kind, build_grid(Box.cubic(15.0), 2.5))
    off = s.offsets
    items = [(1 / 6, (off[0],) * 3)]
    for p, q in s.pairs:
        items += [(0.5, (off[p], off[p], off[q])), (0.5, (off[p], off[q], off[q]))]
    items += [(1.0, tuple(off[i] for i in t)) for t in s.triplets]
    w = np.array([x for x, _ in items])
    acc = np.array([accept_rate(c, product) for _, c in items])
    return 100 * (w @ acc) / w.sum()


box = Box.cubic(37.5)
phase = PhaseSpace(rng.random((37000, 3)) * 37.5, None, box)
for kind in ("3c18", "3c08"):
    for cut in ("pair", "product"):
        ff = ForceField(box, Params(traversal=kind, cutoff_mode=cut))
        measured = hitrate(ff.compute(phase, pairs=False).counters)
        print(f"{kind} {cut:7s}  geometry {predicted(kind, cut == 'product'):6.3f}%   measured {measured:6.3f}%")
