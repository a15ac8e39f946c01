"""Cell-triplet traversals, their colorings, and the force executor.

A traversal is a per-cell template: a list of local cells given as offsets
from the base cell, plus the single cells, cell pairs and cell triplets that a
task runs the one-, two- and three-cell routines on. Local index 0 is always
the base.

* ``3c01`` visits the 27-cell neighborhood from every base and writes only the
  base cell, so every cell is its own color.
* ``3c18`` pairs the base with its 13 forward neighbors and forms triplets
  from the base and any two distinct forward neighbors.
* ``3c08`` works on the 2x2x2 block anchored at the base and owns every group
  of block cells whose bounding box starts at the base.

Colors come from a per-axis cyclic block tiling. When an axis length is a
multiple of the template width this is the classic 18 or 8 color pattern;
other lengths use a few more colors rather than being rejected.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator

import numba
import numpy as np

from . import _kernels
from .cells import FORWARD_OFFSETS, CellGrid, CellIndex, bin_particles, build_grid, neighbor
from .core import Box, CutoffMode, DomainError, Params, PhaseSpace, Traversal

CellRef = tuple[CellIndex, np.ndarray]


# -- templates -----------------------------------------------------------------


@dataclass(frozen=True)
class _Template:
    offsets: np.ndarray  # (K, 3)
    singles: np.ndarray  # (S,)
    pairs: np.ndarray  # (P, 2)
    triplets: np.ndarray  # (T, 3)
    writes: np.ndarray  # local cells whose particles the task mutates


def _as_array(rows, width):
    return np.array(rows, dtype=np.int64).reshape(-1, width)


def _template_3c01() -> _Template:
    others = [o for o in itertools.product((-1, 0, 1), repeat=3) if any(o)]
    others = [tuple(reversed(o)) for o in others]
    offs = [(0, 0, 0)] + others
    K = len(offs)
    # cell multisets met by the one-sided scan besides the base alone
    ext = [(0, l1, l2) for l1 in range(K) for l2 in range(l1, K) if (l1, l2) != (0, 0)]
    return _Template(
        offsets=_as_array(offs, 3),
        singles=np.array([0], dtype=np.int64),
        pairs=_as_array([(0, l) for l in range(1, K)], 2),
        triplets=_as_array(ext, 3),
        writes=np.array([0], dtype=np.int64),
    )


def _template_3c18() -> _Template:
    offs = [(0, 0, 0)] + list(FORWARD_OFFSETS)
    K = len(offs)
    return _Template(
        offsets=_as_array(offs, 3),
        singles=np.array([0], dtype=np.int64),
        pairs=_as_array([(0, m) for m in range(1, K)], 2),
        triplets=_as_array([(0, m, n) for m in range(1, K) for n in range(m + 1, K)], 3),
        writes=np.arange(K, dtype=np.int64),
    )


def _template_3c08() -> _Template:
    block = [(x, y, z) for z in (0, 1) for y in (0, 1) for x in (0, 1)]

    # A group of block cells belongs to this block when its bounding box
    # starts at the block's anchor. Every group of mutually adjacent cells
    # has exactly one such anchor, which gives exactly-once coverage.
    def owned(group):
        return all(min(block[c][a] for c in group) == 0 for a in range(3))

    groups = {size: [g for g in itertools.combinations(range(8), size) if owned(g)] for size in (1, 2, 3)}
    return _Template(
        offsets=_as_array(block, 3),
        singles=np.array([g[0] for g in groups[1]], dtype=np.int64),
        pairs=_as_array(groups[2], 2),
        triplets=_as_array(groups[3], 3),
        writes=np.arange(8, dtype=np.int64),
    )


_TEMPLATES = {
    Traversal.C01: _template_3c01,
    Traversal.C18: _template_3c18,
    Traversal.C08: _template_3c08,
}


# -- coloring ------------------------------------------------------------------


def _axis_colors(n: int, width: int) -> tuple[np.ndarray, int]:
    """Color of each coordinate along one periodic axis.

    The axis is cut into ``n // width`` blocks of near-equal size (each at
    least ``width``); a coordinate's color is its position inside its block.
    Two coordinates with the same color are then at least ``width`` apart in
    both directions, so footprints of that width never overlap.
    """
    m = max(n // width, 1)
    q, r = divmod(n, m)
    sizes = [q + 1] * r + [q] * (m - r)
    colors = np.concatenate([np.arange(s) for s in sizes])
    return colors, max(sizes)


def _color_cells(grid: CellGrid, width) -> list[np.ndarray]:
    per_axis = [_axis_colors(n, w) for n, w in zip(grid.n, width)]
    k = [c for _, c in per_axis]
    coords = grid.coords_of(np.arange(grid.n_cells))
    cid = (per_axis[0][0][coords[:, 0]]
           + k[0] * (per_axis[1][0][coords[:, 1]] + k[1] * per_axis[2][0][coords[:, 2]]))
    return [np.flatnonzero(cid == c) for c in range(k[0] * k[1] * k[2])]


# -- schedules -----------------------------------------------------------------


@dataclass
class CellTask:
    """One base cell's work, with periodic shifts resolved.

    ``base_pairs`` are the partners of the pairs whose first cell is the base;
    ``triplet_extensions[i]`` lists the third cells completing ``base_pairs[i]``.
    ``pairs`` and ``triplets`` give every cell group of the task, which for
    3c08 also includes groups not containing the base.
    """

    base: CellIndex
    singles: list[CellRef]
    base_pairs: list[CellRef]
    triplet_extensions: list[list[CellRef]]
    pairs: list[tuple[CellRef, CellRef]]
    triplets: list[tuple[CellRef, CellRef, CellRef]]


@dataclass
class TraversalSchedule:
    kind: Traversal
    newton: bool
    grid_shape: tuple[int, int, int]
    offsets: np.ndarray
    singles: np.ndarray
    pairs: np.ndarray
    triplets: np.ndarray
    writes: np.ndarray
    color_cells: list[np.ndarray]
    color_ptr: np.ndarray = field(init=False)
    color_tasks: np.ndarray = field(init=False)

    def __post_init__(self):
        sizes = [len(c) for c in self.color_cells]
        self.color_ptr = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
        self.color_tasks = np.concatenate(self.color_cells).astype(np.int64)

    @property
    def n_colors(self) -> int:
        return len(self.color_cells)

    @property
    def colors(self) -> list[np.ndarray]:
        """Base cells of each color, in execution order."""
        return self.color_cells

    def local_cells(self, base: int, grid: CellGrid) -> list[CellRef]:
        ci = grid.index_of_flat(base)
        return [neighbor(ci, o, grid) for o in self.offsets]

    def write_set(self, base: int, grid: CellGrid) -> set[int]:
        local = self.local_cells(base, grid)
        return {local[l][0].flat for l in self.writes}

    def task(self, base: int, grid: CellGrid) -> CellTask:
        local = self.local_cells(base, grid)
        base_pairs = [local[q] for p, q in self.pairs if p == 0]
        ext = [[local[t[2]] for t in self.triplets if t[0] == 0 and t[1] == q]
               for p, q in self.pairs if p == 0]
        return CellTask(
            base=local[0][0],
            singles=[local[s] for s in self.singles],
            base_pairs=base_pairs,
            triplet_extensions=ext,
            pairs=[(local[p], local[q]) for p, q in self.pairs],
            triplets=[(local[a], local[b], local[c]) for a, b, c in self.triplets],
        )

    def tasks(self, grid: CellGrid) -> Iterator[tuple[int, CellTask]]:
        """``(color, task)`` in execution order."""
        for color, bases in enumerate(self.color_cells):
            for b in bases:
                yield color, self.task(int(b), grid)

    def emitted(self, grid: CellGrid) -> dict[str, list[tuple[int, ...]]]:
        """Sorted flat-id groups per emission, over all tasks.

        Duplicates are kept, so exactly-once coverage can be checked by
        comparing with the set of the same list.
        """
        out = {"singles": [], "pairs": [], "triplets": []}
        for bases in self.color_cells:
            for b in bases:
                flat = [ref[0].flat for ref in self.local_cells(int(b), grid)]
                out["singles"] += [(flat[s],) for s in self.singles]
                out["pairs"] += [tuple(sorted((flat[p], flat[q]))) for p, q in self.pairs]
                out["triplets"] += [tuple(sorted(flat[c] for c in t)) for t in self.triplets]
        return out

    def cell_triplet_keys(self, grid: CellGrid) -> np.ndarray:
        """Sorted unique codes ``c1*Nc^2 + c2*Nc + c3`` (c1 <= c2 <= c3) of every
        cell multiset in which a Newton schedule looks for particle triplets."""
        if not self.newton:
            raise ValueError("cell multisets are only defined for Newton schedules")
        keys = set()
        em = self.emitted(grid)
        for (s,) in em["singles"]:
            keys.add((s, s, s))
        for p, q in em["pairs"]:
            keys.add((p, p, q))
            keys.add((p, q, q))
        keys.update(em["triplets"])
        nc = grid.n_cells
        return np.array(sorted(a * nc * nc + b * nc + c for a, b, c in keys), dtype=np.int64)


def _make(kind: Traversal, grid: CellGrid) -> TraversalSchedule:
    t = _TEMPLATES[kind]()
    newton = kind is not Traversal.C01
    if newton:
        w = t.offsets[t.writes]
        width = w.max(axis=0) - w.min(axis=0) + 1
        colors = _color_cells(grid, width)
    else:
        colors = [np.arange(grid.n_cells, dtype=np.int64)]
    return TraversalSchedule(kind, newton, grid.n, t.offsets, t.singles, t.pairs, t.triplets,
                             t.writes, colors)


def schedule_3c01(grid: CellGrid) -> TraversalSchedule:
    return _make(Traversal.C01, grid)


def schedule_3c18(grid: CellGrid) -> TraversalSchedule:
    return _make(Traversal.C18, grid)


def schedule_3c08(grid: CellGrid) -> TraversalSchedule:
    return _make(Traversal.C08, grid)


def make_schedule(kind, grid: CellGrid) -> TraversalSchedule:
    return _make(Traversal(kind), grid)


# -- enumeration counts --------------------------------------------------------


def count_single(n: int) -> int:
    """Particle triplets inside one cell."""
    return math.comb(n, 3)


def count_pair(n1: int, n2: int) -> int:
    """Particle triplets spanning two cells, both splits."""
    return n2 * math.comb(n1, 2) + n1 * math.comb(n2, 2)


def count_triple(n1: int, n2: int, n3: int) -> int:
    return n1 * n2 * n3


# -- execution -----------------------------------------------------------------


@dataclass
class TripletCounters:
    traversed: int = 0
    accepted: int = 0
    pairs_traversed: int = 0
    pairs_accepted: int = 0

    def add(self, counts) -> None:
        t, a, pt, pa = (int(v) for v in counts)
        self.traversed += t
        self.accepted += a
        self.pairs_traversed += pt
        self.pairs_accepted += pa

    def reset(self) -> None:
        self.traversed = self.accepted = self.pairs_traversed = self.pairs_accepted = 0


def hitrate(counters: TripletCounters, pairs: bool = False) -> float:
    """Accepted over traversed candidates, in percent."""
    t, a = ((counters.pairs_traversed, counters.pairs_accepted) if pairs
            else (counters.traversed, counters.accepted))
    if t == 0:
        raise ZeroDivisionError("hitrate undefined: nothing was traversed")
    return 100.0 * a / t


class _threads:
    def __init__(self, k):
        self.k = k

    def __enter__(self):
        self.prev = numba.get_num_threads()
        if self.k is not None:
            numba.set_num_threads(int(self.k))

    def __exit__(self, *exc):
        numba.set_num_threads(self.prev)


def _run(schedule, grid, phase, params, *, pairs, triplets, nu, record_size, threads):
    nt = len(schedule.color_tasks)
    energy = np.zeros((nt, 4))
    counts = np.zeros((nt, 4), dtype=np.int64)
    errors = np.zeros(nt, dtype=np.int64)
    rec = np.zeros((record_size, 3), dtype=np.int64)
    rec_n = np.zeros(1, dtype=np.int64)
    rc = params.r_c
    with _threads(1 if record_size else threads):
        _kernels.sweep(
            phase.positions, phase.box.L, np.array(grid.n, dtype=np.int64), grid.cell_start,
            grid.cell_particles, schedule.offsets, schedule.singles, schedule.pairs,
            schedule.triplets, schedule.newton, schedule.color_ptr, schedule.color_tasks,
            bool(pairs), bool(triplets), params.cutoff_mode is CutoffMode.PRODUCT,
            rc * rc, rc**6, params.epsilon, params.sigma**2, params.nu if nu is None else float(nu),
            grid.needs_minimum_image, phase.forces, energy, counts, errors, rec, rec_n,
        )
    if errors.any():
        raise DomainError("coincident particles inside the force loop")
    return energy, counts, rec, int(rec_n[0])


def execute(schedule: TraversalSchedule, grid: CellGrid, phase: PhaseSpace, params: Params,
            counters: TripletCounters | None = None, *, pairs: bool = True, triplets: bool = True,
            nu: float | None = None, threads: int | None = None) -> tuple[float, float, float, float]:
    """Accumulate forces into ``phase.forces`` and return ``(E2, E3, W2, W3)``.

    Particles must already be binned into ``grid``; forces are not zeroed.
    ``pairs`` and ``triplets`` switch the Lennard-Jones and three-body parts.
    """
    energy, counts, _, _ = _run(schedule, grid, phase, params, pairs=pairs, triplets=triplets,
                                nu=nu, record_size=0, threads=threads)
    if counters is not None:
        counters.add(counts.sum(axis=0))
    E2, E3, W2, W3 = energy.sum(axis=0)
    return float(E2), float(E3), float(W2), float(W3)


def accepted_triplets(schedule: TraversalSchedule, grid: CellGrid, phase: PhaseSpace,
                      params: Params) -> np.ndarray:
    """Every accepted particle triplet as sorted index rows, one row per acceptance.

    Runs single-threaded; ``phase.forces`` is left untouched.
    """
    scratch = phase.copy()
    scratch.forces[:] = 0.0
    _, _, _, total = _run(schedule, grid, scratch, params, pairs=False, triplets=True, nu=None,
                          record_size=1, threads=1)
    _, _, rec, _ = _run(schedule, grid, scratch, params, pairs=False, triplets=True, nu=None,
                        record_size=max(total, 1), threads=1)
    return np.sort(rec[:total], axis=1)


@dataclass
class ForceResult:
    E2: float
    E3: float
    W2: float
    W3: float
    counters: TripletCounters

    @property
    def potential(self) -> float:
        return self.E2 + self.E3


class ForceField:
    """Grid, schedule and parameters bundled for repeated force evaluations."""

    def __init__(self, box: Box, params: Params, threads: int | None = None):
        self.box = box
        self.params = params
        self.threads = threads
        self.grid = build_grid(box, params.r_c)
        self.schedule = make_schedule(params.traversal, self.grid)

    def compute(self, phase: PhaseSpace, *, nu: float | None = None, pairs: bool = True,
                triplets: bool = True) -> ForceResult:
        """Zero, rebin and recompute forces in place."""
        phase.forces[:] = 0.0
        return self.compute_into(phase, nu=nu, pairs=pairs, triplets=triplets)

    def compute_into(self, phase: PhaseSpace, *, nu: float | None = None, pairs: bool = True,
                     triplets: bool = True) -> ForceResult:
        """Rebin and add forces to ``phase.forces`` without clearing them."""
        if phase.box != self.box:
            raise ValueError("phase box differs from the force field's box")
        bin_particles(self.grid, phase)
        counters = TripletCounters()
        E2, E3, W2, W3 = execute(self.schedule, self.grid, phase, self.params, counters,
                                 pairs=pairs, triplets=triplets and (nu is None or nu != 0.0),
                                 nu=nu, threads=self.threads)
        return ForceResult(E2, E3, W2, W3, counters)
