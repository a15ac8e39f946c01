"""Linked-cell grid: construction, binning and periodic neighbor arithmetic.

Cells are numbered lexicographically with x fastest,
``flat = cx + nx * (cy + ny * cz)``. Particles of a periodic neighbor are
used with a shift vector added to their positions, so the base cell and its
neighbors share one continuous frame.
"""

from __future__ import annotations

import itertools
from typing import NamedTuple

import numpy as np

from .core import Box, ConfigurationError, PhaseSpace


def offsets(dim: int = 3) -> list[tuple[int, ...]]:
    """All offsets in {-1, 0, 1}^dim in ascending lexicographic (x fastest) order."""
    return [tuple(reversed(o)) for o in itertools.product((-1, 0, 1), repeat=dim)]


def is_forward(offset) -> bool:
    """True when the unwrapped flat index grows, i.e. the last nonzero of (x, y, z...) read from z is positive."""
    for c in reversed(offset):
        if c:
            return c > 0
    return False


def forward_offsets(dim: int = 3) -> list[tuple[int, ...]]:
    """The half shell: 13 offsets in 3D, 4 in 2D, ordered by unwrapped flat index."""
    return [o for o in offsets(dim) if is_forward(o)]


FORWARD_OFFSETS = forward_offsets(3)


class CellIndex(NamedTuple):
    flat: int
    coords: tuple[int, int, int]


class CellGrid:
    """Periodic cell grid with CSR particle bins.

    After :func:`bin_particles`, ``cell_particles[cell_start[c]:cell_start[c + 1]]``
    lists the particles of cell ``c`` in ascending index order.
    """

    def __init__(self, box: Box, n: tuple[int, int, int], r_c: float):
        self.box = box
        self.n = tuple(int(v) for v in n)
        self.r_c = float(r_c)
        self.cell_len = box.L / np.array(self.n)
        self.n_cells = int(np.prod(self.n))
        self.cell_start = np.zeros(self.n_cells + 1, dtype=np.int64)
        self.cell_particles = np.zeros(0, dtype=np.int64)
        self.particle_cell = np.zeros(0, dtype=np.int64)

    def __repr__(self):
        return f"CellGrid(n={self.n}, cell_len={tuple(np.round(self.cell_len, 6))})"

    def index(self, coords) -> CellIndex:
        c = tuple(int(v) % m for v, m in zip(coords, self.n))
        return CellIndex(c[0] + self.n[0] * (c[1] + self.n[1] * c[2]), c)

    def index_of_flat(self, flat: int) -> CellIndex:
        nx, ny, _ = self.n
        flat = int(flat)
        return CellIndex(flat, (flat % nx, (flat // nx) % ny, flat // (nx * ny)))

    def coords_of(self, flat):
        flat = np.asarray(flat)
        nx, ny, _ = self.n
        return np.stack([flat % nx, (flat // nx) % ny, flat // (nx * ny)], axis=-1)

    @property
    def bins(self) -> list[np.ndarray]:
        s = self.cell_start
        return [self.cell_particles[s[c]:s[c + 1]] for c in range(self.n_cells)]

    @property
    def occupancy(self) -> np.ndarray:
        return np.diff(self.cell_start)

    @property
    def needs_minimum_image(self) -> bool:
        # cells two apart can be nearer through the boundary than across
        # the shifted frame only when an axis has fewer than six cells
        return min(self.n) < 6


def build_grid(box: Box, r_c: float) -> CellGrid:
    L = box.L
    if np.any(L < 3.0 * r_c):
        raise ConfigurationError(f"box {box.lengths} needs at least 3 cells of size r_c={r_c} per axis")
    n = np.floor(L / r_c).astype(int)
    n = np.where(L / n < r_c, n - 1, n)
    return CellGrid(box, tuple(n), r_c)


def bin_particles(grid: CellGrid, phase: PhaseSpace) -> None:
    n = np.array(grid.n)
    c = np.floor(phase.positions / grid.cell_len).astype(np.int64)
    c = np.clip(c, 0, n - 1)
    flat = c[:, 0] + n[0] * (c[:, 1] + n[1] * c[:, 2])
    grid.particle_cell = flat
    grid.cell_particles = np.argsort(flat, kind="stable").astype(np.int64)
    grid.cell_start = np.zeros(grid.n_cells + 1, dtype=np.int64)
    np.cumsum(np.bincount(flat, minlength=grid.n_cells), out=grid.cell_start[1:])


def neighbor(ci: CellIndex, offset, grid: CellGrid) -> tuple[CellIndex, np.ndarray]:
    """Periodic neighbor of ``ci`` and the shift to add to its particle positions."""
    raw = np.asarray(ci.coords) + np.asarray(offset)
    n = np.array(grid.n)
    wraps = np.floor_divide(raw, n)
    return grid.index(raw), wraps * grid.box.L


def forward_neighbors(ci: CellIndex, grid: CellGrid) -> list[tuple[CellIndex, np.ndarray]]:
    return [neighbor(ci, o, grid) for o in FORWARD_OFFSETS]
