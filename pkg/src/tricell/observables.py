"""Thermodynamic samples, pressure, tail corrections, RDF, density profiles and
interface fits."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import astuple, dataclass, fields

import numpy as np
from numba import njit
from scipy.optimize import least_squares

from .core import Box, Params, PhaseSpace

N_BINS = 600


@dataclass(frozen=True)
class ThermoSample:
    step: int
    E2_per_N: float
    E3_per_N: float
    E_kin_per_N: float
    T_inst: float
    P: float
    W2: float
    W3: float

    @property
    def E_per_N(self) -> float:
        """Potential energy per particle."""
        return self.E2_per_N + self.E3_per_N


def instantaneous_pressure(N: int, volume: float, T: float, W2: float, W3: float,
                           P_tail: float = 0.0) -> float:
    return N * T / volume + (W2 + W3) / (3.0 * volume) + P_tail


def pressure(samples, volume: float, N: int, P_tail: float = 0.0) -> float:
    """Ensemble pressure from the mean temperature and mean virials."""
    samples = list(samples)
    if not samples:
        raise ValueError("no samples to average")
    T = np.mean([s.T_inst for s in samples])
    W2 = np.mean([s.W2 for s in samples])
    W3 = np.mean([s.W3 for s in samples])
    return instantaneous_pressure(N, volume, float(T), float(W2), float(W3), P_tail)


def lrc_homogeneous(rho: float, r_c: float, params: Params = Params()) -> tuple[float, float]:
    """Lennard-Jones tail corrections ``(E_tail / N, P_tail)`` beyond ``r_c``."""
    eps, sig = params.epsilon, params.sigma
    x3 = (sig / r_c) ** 3
    x9 = x3**3
    e = 8.0 / 3.0 * math.pi * rho * eps * sig**3 * (x9 / 3.0 - x3)
    p = 16.0 / 3.0 * math.pi * rho**2 * eps * sig**3 * (2.0 * x9 / 3.0 - x3)
    return e, p


def write_thermo(path, samples) -> None:
    names = [f.name for f in fields(ThermoSample)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for s in samples:
            w.writerow([repr(v) for v in astuple(s)])


def read_thermo(path) -> list[ThermoSample]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [ThermoSample(int(r["step"]), *(float(r[f.name]) for f in fields(ThermoSample)[1:]))
            for r in rows]


def write_table(path, header, columns) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([repr(float(v)) for v in row])


# -- radial distribution -------------------------------------------------------


@njit(cache=True)
def _pair_histogram(pos, L, r_max, counts):
    N = pos.shape[0]
    nb = counts.shape[0]
    scale = nb / r_max
    r_max2 = r_max * r_max
    for i in range(N):
        for j in range(i + 1, N):
            s = 0.0
            for x in range(3):
                v = pos[i, x] - pos[j, x]
                v -= L[x] * np.floor(v / L[x] + 0.5)
                s += v * v
            if s <= r_max2 and s > 0.0:
                b = int(math.sqrt(s) * scale)
                if b >= nb:
                    b = nb - 1
                counts[b] += 2.0


class RDF:
    """Ordered-pair histogram on (0, r_max], r_max defaulting to half the shortest side."""

    def __init__(self, box: Box, r_max: float | None = None, bins: int = N_BINS):
        self.box = box
        self.r_max = float(min(box.lengths) / 2 if r_max is None else r_max)
        self.edges = np.linspace(0.0, self.r_max, bins + 1)
        self.counts = np.zeros(bins)
        self.samples = 0

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    def accumulate(self, phase: PhaseSpace) -> None:
        _pair_histogram(phase.positions, phase.box.L, self.r_max, self.counts)
        self.samples += 1

    def finalize(self, rho: float, N: int) -> tuple[np.ndarray, np.ndarray]:
        if self.samples == 0:
            raise ValueError("no RDF samples")
        shell = 4.0 / 3.0 * math.pi * (self.edges[1:] ** 3 - self.edges[:-1] ** 3)
        return self.centers, self.counts / (N * shell * rho * self.samples)


def rdf_accumulate(phase: PhaseSpace, hist: RDF) -> None:
    hist.accumulate(phase)


def rdf_finalize(hist: RDF, rho: float, N: int) -> tuple[np.ndarray, np.ndarray]:
    return hist.finalize(rho, N)


# -- density profile -----------------------------------------------------------


class DensityProfile:
    def __init__(self, box: Box, axis: int = 2, bins: int = N_BINS):
        self.box = box
        self.axis = axis
        self.length = box.lengths[axis]
        self.edges = np.linspace(0.0, self.length, bins + 1)
        self.counts = np.zeros(bins)
        self.samples = 0

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    @property
    def bin_volume(self) -> float:
        return self.box.volume / len(self.counts)

    def accumulate(self, phase: PhaseSpace) -> None:
        nb = len(self.counts)
        idx = np.floor(phase.positions[:, self.axis] / self.length * nb).astype(np.int64)
        self.counts += np.bincount(np.clip(idx, 0, nb - 1), minlength=nb)
        self.samples += 1

    def finalize(self) -> tuple[np.ndarray, np.ndarray]:
        if self.samples == 0:
            raise ValueError("no profile samples")
        return self.centers, self.counts / (self.bin_volume * self.samples)


def density_profile_accumulate(phase: PhaseSpace, hist: DensityProfile) -> None:
    hist.accumulate(phase)


# -- interface fit -------------------------------------------------------------


class Side(str, enum.Enum):
    LEFT = "left"  # vapor below z0, liquid above
    RIGHT = "right"  # liquid below z0, vapor above


class FitError(RuntimeError):
    pass


@dataclass(frozen=True)
class InterfaceFit:
    rho_l: float
    rho_g: float
    z0: float
    d: float
    side: Side
    residual: float
    iterations: int


def tanh_profile(z, rho_l, rho_g, z0, d, side=Side.RIGHT):
    """Mean-field interface: liquid density ``rho_l`` on one side, ``rho_g`` on the other."""
    sgn = 1.0 if Side(side) is Side.LEFT else -1.0
    return 0.5 * (rho_l + rho_g) + sgn * 0.5 * (rho_l - rho_g) * np.tanh(2.0 * (np.asarray(z) - z0) / d)


def _jacobian(z, theta, sgn):
    rho_l, rho_g, z0, d = theta
    t = np.tanh(2.0 * (z - z0) / d)
    sech2 = 1.0 - t * t
    amp = sgn * 0.5 * (rho_l - rho_g)
    return np.stack([
        0.5 + sgn * 0.5 * t,
        0.5 - sgn * 0.5 * t,
        -amp * sech2 * 2.0 / d,
        -amp * sech2 * 2.0 * (z - z0) / d**2,
    ], axis=1)


def _initial_guess(z, rho, side):
    k = max(1, len(rho) // 10)
    ordered = np.sort(rho)
    rho_l = float(ordered[-k:].mean())
    rho_g = float(ordered[:k].mean())
    mid = 0.5 * (rho_l + rho_g)
    above = rho > mid
    # first crossing in the direction of the transition
    want = np.flatnonzero(above[1:] != above[:-1])
    if len(want) == 0:
        z0 = float(z[len(z) // 2])
    else:
        i = want[0] if Side(side) is Side.LEFT else want[-1]
        r0, r1 = rho[i] - mid, rho[i + 1] - mid
        z0 = float(z[i] + (z[i + 1] - z[i]) * r0 / (r0 - r1))
    return np.array([rho_l, rho_g, z0, 1.0])


def fit_interface(z, rho, side, max_iter: int = 200) -> InterfaceFit:
    """Least-squares tanh fit (trust-region reflective, analytic Jacobian)."""
    z = np.asarray(z, dtype=float)
    rho = np.asarray(rho, dtype=float)
    side = Side(side)
    sgn = 1.0 if side is Side.LEFT else -1.0
    theta0 = _initial_guess(z, rho, side)
    lo = np.array([-np.inf, -np.inf, -np.inf, 1e-12])
    sol = least_squares(lambda th: tanh_profile(z, *th, side) - rho, theta0,
                        jac=lambda th: _jacobian(z, th, sgn), bounds=(lo, np.inf),
                        xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_iter)
    if sol.status <= 0:
        raise FitError(f"fit did not converge: {sol.message}")
    rho_l, rho_g, z0, d = (float(v) for v in sol.x)
    if not (d > 1e-9 and rho_l > rho_g):
        raise FitError(f"degenerate fit rho_l={rho_l}, rho_g={rho_g}, d={d}")
    residual = math.sqrt(2.0 * sol.cost / len(z))
    return InterfaceFit(rho_l, rho_g, z0, d, side, residual, int(sol.nfev))


def slab_center(z, rho, length: float) -> float:
    """Center of mass of a periodic profile via the circular mean."""
    ang = 2.0 * math.pi * np.asarray(z) / length
    w = np.asarray(rho)
    return float((math.atan2(w @ np.sin(ang), w @ np.cos(ang)) % (2.0 * math.pi)) * length / (2.0 * math.pi))


def fit_slab(z, rho, length: float) -> tuple[InterfaceFit, InterfaceFit]:
    """Fit both interfaces of a centered liquid slab on either half of the box.

    The profile is rolled so the slab sits mid-box before splitting; fitted
    positions are mapped back to the original frame.
    """
    z = np.asarray(z, dtype=float)
    rho = np.asarray(rho, dtype=float)
    nb = len(z)
    dz = length / nb
    shift = int(round((0.5 * length - slab_center(z, rho, length)) / dz))
    rolled = np.roll(rho, shift)
    half = nb // 2
    fits = []
    for side, sl in ((Side.LEFT, slice(0, half)), (Side.RIGHT, slice(half, nb))):
        f = fit_interface(z[sl], rolled[sl], side)
        fits.append(InterfaceFit(f.rho_l, f.rho_g, (f.z0 - shift * dz) % length, f.d, side,
                                 f.residual, f.iterations))
    return fits[0], fits[1]


def write_fits(path, fits) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["side", "rho_l", "rho_g", "z0", "d", "residual", "form"])
        for f in fits:
            sgn = "+" if f.side is Side.LEFT else "-"
            form = f"(rho_l+rho_g)/2 {sgn} (rho_l-rho_g)/2*tanh(2(z-z0)/d)"
            w.writerow([f.side.value, repr(f.rho_l), repr(f.rho_g), repr(f.z0), repr(f.d),
                        repr(f.residual), form])
