"""Three-body (Axilrod-Teller-Muto) molecular dynamics on linked cells.

The force loops are compiled with numba and parallelised over cell colors.
The worker pool ceiling is fixed when numba first loads, so it is raised here
(unless the caller already set it, or imported numba first) to let
``threads`` exceed the core count.
"""

import os
import sys

if "numba" not in sys.modules:
    os.environ.setdefault("NUMBA_NUM_THREADS", str(max(os.cpu_count() or 1, 64)))
    os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")

import numba  # noqa: E402

numba.set_num_threads(min(os.cpu_count() or 1, numba.config.NUMBA_NUM_THREADS))

from .core import (  # noqa: E402
    Box,
    ConfigurationError,
    CutoffMode,
    DomainError,
    Params,
    PhaseSpace,
    Traversal,
    load_snapshot,
    minimum_image,
    save_snapshot,
    wrap_position,
)
from .potentials import (  # noqa: E402
    ForceTriple,
    TripletGeometry,
    atm_energy,
    atm_gradient,
    cutoff_accept,
    force_triple,
    lj_energy_force,
)
from .cells import CellGrid, CellIndex, bin_particles, build_grid, forward_neighbors, neighbor  # noqa: E402
from .traversal import (  # noqa: E402
    ForceField,
    ForceResult,
    TraversalSchedule,
    TripletCounters,
    execute,
    hitrate,
    make_schedule,
    schedule_3c01,
    schedule_3c08,
    schedule_3c18,
)
from .oracle import OracleResult, brute_force  # noqa: E402

__version__ = "0.1.0"

__all__ = [
    "Box",
    "CellGrid",
    "CellIndex",
    "ConfigurationError",
    "CutoffMode",
    "DomainError",
    "ForceField",
    "ForceResult",
    "ForceTriple",
    "OracleResult",
    "Params",
    "PhaseSpace",
    "Traversal",
    "TraversalSchedule",
    "TripletCounters",
    "TripletGeometry",
    "atm_energy",
    "atm_gradient",
    "bin_particles",
    "brute_force",
    "build_grid",
    "cutoff_accept",
    "execute",
    "force_triple",
    "forward_neighbors",
    "hitrate",
    "lj_energy_force",
    "load_snapshot",
    "make_schedule",
    "minimum_image",
    "neighbor",
    "save_snapshot",
    "schedule_3c01",
    "schedule_3c08",
    "schedule_3c18",
    "wrap_position",
]
