"""Scenario runner and strong-scaling benchmark.

Both read flat ``key = value`` files. Lines starting with ``#`` are comments.
List values (benchmark traversals, cutoffs, thread counts) are comma separated.
"""

from __future__ import annotations

import csv
import os
import statistics
import time
import warnings
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .core import Box, ConfigurationError, CutoffMode, DomainError, Params, PhaseSpace, Traversal, save_snapshot
from .dynamics import Thermostat, ThermostatMode, init_lattice, init_velocities, remove_momentum, step
from .observables import (
    RDF,
    DensityProfile,
    FitError,
    ThermoSample,
    fit_slab,
    instantaneous_pressure,
    lrc_homogeneous,
    write_fits,
    write_table,
    write_thermo,
)
from .traversal import ForceField, TripletCounters, hitrate


def parse_config(text: str) -> dict[str, str]:
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {n}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in out:
            raise ConfigurationError(f"line {n}: duplicate key {key!r}")
        out[key] = value
    return out


def _bool(v: str) -> bool:
    v = v.lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"not a boolean: {v!r}")


def _lengths(v: str) -> tuple[float, float, float]:
    parts = [float(x) for x in v.replace(",", " ").split()]
    if len(parts) == 1:
        parts *= 3
    if len(parts) != 3:
        raise ConfigurationError(f"box needs 1 or 3 lengths, got {v!r}")
    return tuple(parts)


def _from_mapping(cls, raw: dict[str, str], converters):
    unknown = sorted(set(raw) - {f.name for f in fields(cls)})
    if unknown:
        raise ConfigurationError(f"unknown keys: {', '.join(unknown)}")
    kwargs = {}
    for k, v in raw.items():
        try:
            kwargs[k] = converters.get(k, str)(v)
        except ValueError as exc:
            raise ConfigurationError(f"bad value for {k}: {v!r} ({exc})") from None
    return cls(**kwargs)


# -- scenarios -----------------------------------------------------------------


@dataclass
class Scenario:
    """One NVT run: melt, optional slab extension, equilibration, production.

    ``nu`` is switched on at global step ``nu_active_from_step``; before that
    only Lennard-Jones forces act. Sampling keys give an interval in steps
    (0 disables) and apply to the production phase.
    """

    name: str = "run"
    N: int = 1270
    box: tuple[float, float, float] = (12.5, 12.5, 12.5)
    T: float = 1.0
    dt: float = 0.004
    rc: float = 2.5
    nu: float = 0.072
    traversal: Traversal = Traversal.C08
    cutoff: CutoffMode = CutoffMode.PAIR
    steps_melt: int = 0
    steps_equil: int = 0
    steps_prod: int = 0
    nu_active_from_step: int = 0
    seed: int = 1
    threads: int = 1
    thermostat: ThermostatMode = ThermostatMode.RESCALE
    lrc: bool = True
    slab_lz: float = 0.0
    sample_thermo: int = 1
    sample_rdf: int = 0
    sample_profile: int = 0
    output_dir: str = "."

    def __post_init__(self):
        self.traversal = Traversal(self.traversal)
        self.cutoff = CutoffMode(self.cutoff)
        self.thermostat = ThermostatMode(self.thermostat)
        self.box = _lengths(self.box) if isinstance(self.box, str) else tuple(float(v) for v in self.box)
        counts = ("N", "steps_melt", "steps_equil", "steps_prod", "nu_active_from_step",
                  "sample_thermo", "sample_rdf", "sample_profile")
        for k in counts:
            if getattr(self, k) < 0:
                raise ConfigurationError(f"{k} must be >= 0")
        if self.threads < 1:
            raise ConfigurationError("threads must be >= 1")
        if self.slab_lz and self.slab_lz < self.box[2]:
            raise ConfigurationError("slab_lz must not shrink the box")

    @classmethod
    def from_text(cls, text: str) -> Scenario:
        conv = {
            "N": int, "box": _lengths, "T": float, "dt": float, "rc": float, "nu": float,
            "steps_melt": int, "steps_equil": int, "steps_prod": int, "nu_active_from_step": int,
            "seed": int, "threads": int, "lrc": _bool, "slab_lz": float, "sample_thermo": int,
            "sample_rdf": int, "sample_profile": int,
        }
        return _from_mapping(cls, parse_config(text), conv)

    @classmethod
    def from_file(cls, path) -> Scenario:
        return cls.from_text(Path(path).read_text())

    def params(self) -> Params:
        return Params(nu=self.nu, r_c=self.rc, dt=self.dt, T_target=self.T,
                      cutoff_mode=self.cutoff, traversal=self.traversal)


@dataclass
class RunResult:
    scenario: Scenario
    samples: list[ThermoSample]
    phase: PhaseSpace
    output_dir: Path
    E_tail_per_N: float = 0.0
    P_tail: float = 0.0
    fits: tuple = ()
    wall_seconds: float = 0.0

    @property
    def has_averages(self) -> bool:
        return bool(self.samples)

    def mean(self, attr: str) -> float | None:
        if not self.samples:
            return None
        return float(np.mean([getattr(s, attr) for s in self.samples]))

    @property
    def energy_per_N(self) -> float | None:
        """Mean potential energy per particle including the tail correction."""
        if not self.samples:
            return None
        return self.mean("E2_per_N") + self.mean("E3_per_N") + self.E_tail_per_N

    @property
    def pressure(self) -> float | None:
        return self.mean("P")


class ScenarioError(RuntimeError):
    pass


def run_scenario(scenario: Scenario | str | os.PathLike, *, progress=None) -> RunResult:
    """Run all phases and write thermo/summary CSVs plus a final snapshot.

    The output directory receives ``thermo.csv`` (production samples),
    ``summary.csv``, ``final.snap`` and, when sampled, ``rdf.csv``,
    ``profile.csv`` and ``fit.csv``.
    """
    sc = scenario if isinstance(scenario, Scenario) else Scenario.from_file(scenario)
    out = Path(sc.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    params = sc.params()
    box = Box(sc.box)
    phase = PhaseSpace(init_lattice(sc.N, box), init_velocities(sc.N, sc.T, sc.seed), box)
    thermostat = Thermostat(sc.T, sc.thermostat)
    field = ForceField(box, params, threads=sc.threads)

    def nu_at(i):
        return sc.nu if i >= sc.nu_active_from_step else 0.0

    t0 = time.perf_counter()
    res = field.compute(phase, nu=nu_at(0))
    samples: list[ThermoSample] = []
    rdf = profile = None
    e_tail = p_tail = 0.0
    total = sc.steps_melt + sc.steps_equil + sc.steps_prod
    prod_start = sc.steps_melt + sc.steps_equil

    for i in range(1, total + 1):
        if i == sc.steps_melt + 1 and sc.slab_lz:
            box = Box((sc.box[0], sc.box[1], sc.slab_lz))
            phase = PhaseSpace(phase.positions, phase.velocities, box, phase.mass)
            remove_momentum(phase)
            field = ForceField(box, params, threads=sc.threads)
            res = field.compute(phase, nu=nu_at(i - 1))
        if i == prod_start + 1:
            homogeneous = not sc.slab_lz
            if sc.lrc and homogeneous:
                e_tail, p_tail = lrc_homogeneous(phase.density, sc.rc, params)
            if sc.sample_rdf:
                rdf = RDF(box)
            if sc.sample_profile:
                profile = DensityProfile(box)
        try:
            res = step(phase, sc.dt, field, nu=nu_at(i), thermostat=thermostat)
        except DomainError as exc:
            raise ScenarioError(f"step {i}: {exc}") from exc
        if i > prod_start:
            k = i - prod_start
            if sc.sample_thermo and k % sc.sample_thermo == 0:
                N = phase.N
                T = phase.temperature()
                P = instantaneous_pressure(N, box.volume, T, res.W2, res.W3, p_tail)
                samples.append(ThermoSample(i, res.E2 / N, res.E3 / N, phase.kinetic_energy() / N,
                                            T, P, res.W2, res.W3))
            if rdf is not None and k % sc.sample_rdf == 0:
                rdf.accumulate(phase)
            if profile is not None and k % sc.sample_profile == 0:
                profile.accumulate(phase)
        if progress is not None:
            progress(i, total)

    result = RunResult(sc, samples, phase, out, e_tail, p_tail,
                       wall_seconds=time.perf_counter() - t0)
    write_thermo(out / "thermo.csv", samples)
    if rdf is not None:
        write_table(out / "rdf.csv", ["r", "g"], rdf.finalize(phase.density, phase.N))
    if profile is not None:
        z, rho = profile.finalize()
        write_table(out / "profile.csv", ["z", "rho"], (z, rho))
        try:
            result.fits = fit_slab(z, rho, box.lengths[2])
            write_fits(out / "fit.csv", result.fits)
        except FitError as exc:
            warnings.warn(f"interface fit failed: {exc}")
    _write_summary(out / "summary.csv", result)
    save_snapshot(out / "final.snap", phase)
    return result


def _write_summary(path, r: RunResult) -> None:
    rows = [("name", r.scenario.name), ("samples", len(r.samples)),
            ("wall_seconds", repr(r.wall_seconds))]
    if r.has_averages:
        rows += [
            ("E2_per_N", repr(r.mean("E2_per_N"))),
            ("E3_per_N", repr(r.mean("E3_per_N"))),
            ("E_tail_per_N", repr(r.E_tail_per_N)),
            ("E_per_N", repr(r.energy_per_N)),
            ("P", repr(r.pressure)),
            ("P_tail", repr(r.P_tail)),
            ("T", repr(r.mean("T_inst"))),
        ]
    else:
        rows.append(("averages", "absent"))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["quantity", "value"])
        w.writerows(rows)


# -- benchmark -----------------------------------------------------------------


def mmups(N: int, iterations: int, wall_seconds: float) -> float:
    """Million molecule updates per second."""
    if not wall_seconds > 0:
        raise ValueError("wall time must be positive")
    return N * iterations / (wall_seconds * 1e6)


def _csv_list(conv):
    return lambda v: [conv(x.strip()) for x in v.split(",") if x.strip()]


@dataclass
class BenchConfig:
    N: int = 37000
    box: tuple[float, float, float] = (37.5, 37.5, 37.5)
    T: float = 1.2
    rc: float = 2.5
    nu: float = 0.072
    dt: float = 0.004
    traversals: list = field(default_factory=lambda: [t for t in Traversal])
    cutoffs: list = field(default_factory=lambda: [c for c in CutoffMode])
    threads: list = field(default_factory=lambda: [1])
    iterations: int = 10
    repetitions: int = 5
    seed: int = 1
    output: str = "bench.csv"

    @classmethod
    def from_text(cls, text: str) -> BenchConfig:
        conv = {
            "N": int, "box": _lengths, "T": float, "rc": float, "nu": float, "dt": float,
            "traversals": _csv_list(Traversal), "cutoffs": _csv_list(CutoffMode),
            "threads": _csv_list(int), "iterations": int, "repetitions": int, "seed": int,
        }
        return _from_mapping(cls, parse_config(text), conv)

    @classmethod
    def from_file(cls, path) -> BenchConfig:
        return cls.from_text(Path(path).read_text())


@dataclass
class BenchRow:
    traversal: Traversal
    cutoff: CutoffMode
    threads: int
    wall_seconds: float  # three-body time per run, mean over repetitions
    wall_std: float
    step_seconds: float  # whole steps, for context
    mmups: float
    hitrate: float
    speedup: float = float("nan")

    @property
    def noisy(self) -> bool:
        return self.wall_std > 0.1 * self.wall_seconds


@dataclass
class BenchReport:
    rows: list[BenchRow]
    meta: dict

    def row(self, traversal, cutoff, threads=None) -> BenchRow:
        for r in self.rows:
            if r.traversal == Traversal(traversal) and r.cutoff == CutoffMode(cutoff) and (
                    threads is None or r.threads == threads):
                return r
        raise KeyError((traversal, cutoff, threads))

    def write(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["traversal", "cutoff", "threads", "wall_seconds", "wall_std",
                        "step_seconds", "mmups", "hitrate", "speedup", "cv_over_10pct"])
            for r in self.rows:
                w.writerow([r.traversal.value, r.cutoff.value, r.threads, repr(r.wall_seconds),
                            repr(r.wall_std), repr(r.step_seconds), repr(r.mmups), repr(r.hitrate),
                            repr(r.speedup), int(r.noisy)])
            for k, v in self.meta.items():
                w.writerow([f"# {k}", v])


def _bench_run(cfg: BenchConfig, params: Params, threads: int):
    """One timed run; returns (three-body seconds, step seconds, counters of the first call)."""
    box = Box(cfg.box)
    phase = PhaseSpace(init_lattice(cfg.N, box), init_velocities(cfg.N, cfg.T, cfg.seed), box)
    ff = ForceField(box, params, threads=threads)

    def forces():
        phase.forces[:] = 0.0
        ff.compute_into(phase, pairs=True, triplets=False)
        t = time.perf_counter()
        r = ff.compute_into(phase, pairs=False, triplets=True)
        return time.perf_counter() - t, r

    _, first = forces()
    three = 0.0
    t_all = time.perf_counter()
    for _ in range(cfg.iterations):
        phase.velocities += 0.5 * cfg.dt * phase.forces
        phase.positions += cfg.dt * phase.velocities
        phase.wrap()
        dt3, _ = forces()
        three += dt3
        phase.velocities += 0.5 * cfg.dt * phase.forces
    return three, time.perf_counter() - t_all, first.counters


def run_benchmark(config: BenchConfig | str | os.PathLike) -> BenchReport:
    """Time the three-body routine over short MD runs from a simple cubic start."""
    cfg = config if isinstance(config, BenchConfig) else BenchConfig.from_file(config)
    hw = os.cpu_count() or 1
    for k in cfg.threads:
        if k > hw:
            warnings.warn(f"{k} threads requested on {hw} hardware threads; timings will be oversubscribed")
    rows = []
    for kind in cfg.traversals:
        for cut in cfg.cutoffs:
            params = Params(nu=cfg.nu, r_c=cfg.rc, dt=cfg.dt, T_target=cfg.T, cutoff_mode=cut,
                            traversal=kind)
            base_wall = None
            for k in cfg.threads:
                walls, steps = [], []
                counters = TripletCounters()
                for _ in range(cfg.repetitions):
                    w, s, counters = _bench_run(cfg, params, k)
                    walls.append(w)
                    steps.append(s)
                wall = statistics.fmean(walls)
                std = statistics.pstdev(walls) if len(walls) > 1 else 0.0
                row = BenchRow(Traversal(kind), CutoffMode(cut), k, wall, std,
                               statistics.fmean(steps), mmups(cfg.N, cfg.iterations, wall),
                               hitrate(counters))
                if k == 1:
                    base_wall = wall
                if base_wall is not None:
                    row.speedup = base_wall / wall
                rows.append(row)
    meta = {"hardware_threads": hw, "N": cfg.N, "box": cfg.box, "iterations": cfg.iterations,
            "repetitions": cfg.repetitions, "scheduling": "static chunks per color (numba prange)",
            "pinning": os.environ.get("OMP_PROC_BIND", "platform default")}
    report = BenchReport(rows, meta)
    return report


# -- self check ----------------------------------------------------------------


def _adjacent_cell_triplets(grid) -> set[tuple[int, int, int]]:
    from itertools import combinations

    coords = grid.coords_of(np.arange(grid.n_cells))
    n = np.array(grid.n)

    def adj(a, b):
        d = np.abs(coords[a] - coords[b])
        return bool(np.all(np.minimum(d, n - d) <= 1))

    near = {c: [o for o in range(grid.n_cells) if o != c and adj(c, o)] for c in range(grid.n_cells)}
    out = set()
    for a in range(grid.n_cells):
        for b, c in combinations(near[a], 2):
            if adj(b, c):
                out.add(tuple(sorted((a, b, c))))
    return out


def verify(seed: int = 0, report=print) -> bool:
    """Oracle equivalence and coverage checks on small random systems."""
    from .cells import build_grid, bin_particles
    from .oracle import brute_force
    from .traversal import execute, make_schedule

    rng = np.random.default_rng(seed)
    ok_all = True

    def check(name, ok, detail=""):
        nonlocal ok_all
        ok_all &= bool(ok)
        report(f"{'PASS' if ok else 'FAIL'}  {name}{'  ' + detail if detail else ''}")

    for rho, N in ((0.1, 150), (0.65, 400)):
        L = (N / rho) ** (1 / 3)
        box = Box.cubic(L)
        phase = PhaseSpace(rng.random((N, 3)) * L, None, box)
        grid = build_grid(box, 2.5)
        bin_particles(grid, phase)
        for cut in CutoffMode:
            for kind in Traversal:
                params = Params(cutoff_mode=cut, traversal=kind)
                sched = make_schedule(kind, grid)
                phase.forces[:] = 0.0
                E2, E3, W2, W3 = execute(sched, grid, phase, params)
                if cut is CutoffMode.PAIR:
                    ref = brute_force(phase, params)
                elif kind is Traversal.C01:
                    ref = brute_force(phase, params, one_sided=True)
                else:
                    ref = brute_force(phase, params, cell_keys=sched.cell_triplet_keys(grid))
                scale = np.abs(ref.forces).max()
                ferr = np.abs(phase.forces - ref.forces).max() / scale
                eerr = max(abs(a - b) / max(abs(b), 1e-300) for a, b in
                           ((E2, ref.E2), (E3, ref.E3), (W2, ref.W2), (W3, ref.W3)))
                check(f"oracle {kind.value} {cut.value} rho={rho}", ferr <= 1e-10 and eerr <= 1e-10,
                      f"force {ferr:.1e} energy {eerr:.1e}")

    for n in (4, 6):
        grid = build_grid(Box.cubic(2.5 * n), 2.5)
        want = _adjacent_cell_triplets(grid)
        for kind in (Traversal.C18, Traversal.C08):
            sched = make_schedule(kind, grid)
            em = sched.emitted(grid)
            adj = [t for t in em["triplets"] if t in want]
            pairs = em["pairs"]
            once = (len(adj) == len(set(adj)) == len(want) and len(pairs) == len(set(pairs))
                    == 13 * grid.n_cells)
            disjoint = all(
                not (sched.write_set(int(a), grid) & sched.write_set(int(b), grid))
                for bases in sched.colors for i, a in enumerate(bases) for b in bases[i + 1:]
            )
            check(f"coverage {kind.value} {n}^3", once, f"{len(want)} adjacent triplets")
            check(f"disjoint colors {kind.value} {n}^3", disjoint, f"{sched.n_colors} colors")
    return ok_all
