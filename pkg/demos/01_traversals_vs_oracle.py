# Three ways to walk cell triplets, checked against plain loops.
#
# A few hundred particles at liquid density in a 7.7^3 box: small enough for
# the O(N^3) reference, big enough for a 3x3x3 cell grid.

import numpy as np

from tricell import Box, ForceField, Params, PhaseSpace, brute_force, hitrate
from tricell.cells import build_grid
from tricell.traversal import make_schedule

rng = np.random.default_rng(0)
N, rho = 400, 0.65
L = (N / rho) ** (1 / 3)
box = Box.cubic(L)
phase = PhaseSpace(rng.random((N, 3)) * L, None, box)
print(f"N={N}  L={L:.3f}  grid={build_grid(box, 2.5).n}")

# %% pair cutoff: every traversal should land on the reference to round-off
ref = brute_force(phase, Params())
print(f"\nreference  E3={ref.E3:.10f}  accepted triplets={ref.accepted_triplets}")
for kind in ("3c01", "3c18", "3c08"):
    ff = ForceField(box, Params(traversal=kind))
    r = ff.compute(phase)
    err = np.abs(phase.forces - ref.forces).max() / np.abs(ref.forces).max()
    print(f"{kind}  E3={r.E3:.10f}  force error {err:.1e}  hitrate {hitrate(r.counters):.2f}%")

# %% product cutoff: each traversal sees a different neighbourhood
# 3c08 drops some cell triplets 3c18 visits, 3c18 drops some 3c01 visits.
for kind in ("3c01", "3c18", "3c08"):
    r = ForceField(box, Params(traversal=kind, cutoff_mode="product")).compute(phase)
    print(f"{kind} product  E3={r.E3:.8f}  accepted {r.counters.accepted}")

# %% task shapes on a 6^3 grid
grid = build_grid(Box.cubic(15.0), 2.5)
for kind in ("3c01", "3c18", "3c08"):
    s = make_schedule(kind, grid)
    print(f"{kind}: {s.n_colors} colors, per task {len(s.singles)} singles, "
          f"{len(s.pairs)} pairs, {len(s.triplets)} triplets")
