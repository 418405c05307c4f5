"""Lattice grid, wavefunction container, dispersion, and basic observables.

Unit system: hbar = m = 1, the hopping J is the unit of energy, time is
measured in 1/J, positions in lattice sites (x = j * delta_x relates a site
index to the dimensionless continuum coordinate).  The tight-binding band is
E(k) = -2J cos k with crystal momentum k in the first Brillouin zone
[-pi, pi); the group velocity 2J sin k is bounded by 2J.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError

J = 1.0  # hopping amplitude, fixed unit of energy
V_MAX = 2.0 * J  # maximum group velocity, the lattice "speed of light"


@dataclass(frozen=True)
class UnitSystem:
    """Frozen constants of the unit system (mutation raises FrozenInstanceError)."""

    J_value: float = 1.0
    hbar: float = 1.0
    mass: float = 1.0
    continuum_accel: float = 0.5  # self-acceleration of the continuum Airy solution


UNITS = UnitSystem()


@dataclass(frozen=True)
class LatticeGrid:
    """Finite site range [j_min, j_max] with spacing delta_x; position(j) = j*delta_x."""

    delta_x: float
    j_min: int
    j_max: int

    def __post_init__(self):
        if not (self.delta_x > 0 and math.isfinite(self.delta_x)):
            raise ConfigurationError(f"delta_x must be positive, got {self.delta_x}")
        if self.j_min >= self.j_max:
            raise ConfigurationError(
                f"need j_min < j_max, got [{self.j_min}, {self.j_max}]"
            )

    @property
    def n_sites(self) -> int:
        return self.j_max - self.j_min + 1

    def sites(self) -> np.ndarray:
        return np.arange(self.j_min, self.j_max + 1)

    def position(self, j) -> float:
        return j * self.delta_x

    def positions(self) -> np.ndarray:
        return self.sites() * self.delta_x


@dataclass
class WaveState:
    """Complex amplitude per site plus the current time (units 1/J).

    Treated as an immutable value object: every operation returns a new state.
    """

    amplitudes: np.ndarray
    time: float
    grid: LatticeGrid = field(repr=False)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (self.grid.n_sites,):
            raise ConfigurationError(
                f"amplitude array has shape {self.amplitudes.shape}, "
                f"grid has {self.grid.n_sites} sites"
            )

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def normalized(self) -> "WaveState":
        return WaveState(self.amplitudes / self.norm(), self.time, self.grid)


def dispersion(k):
    """Band energy E(k) = -2J cos k (periodic, so no zone wrapping needed)."""
    return -2.0 * J * np.cos(k)


def group_velocity(k):
    """dE/dk = 2J sin k, in sites per unit time; maximum 2J at k = pi/2."""
    return 2.0 * J * np.sin(k)


def brillouin_momenta(n: int) -> np.ndarray:
    """Uniform zone grid k_n = -pi + 2 pi n / N, n = 0..N-1."""
    return -np.pi + 2.0 * np.pi * np.arange(n) / n


def to_momentum(amplitudes: np.ndarray) -> np.ndarray:
    """Unitary transform onto brillouin_momenta: psi~(k) = sum_j e^{-ikj} psi_j / sqrt(N).

    The k_n = -pi + 2 pi n/N grid maps onto a plain FFT after staggering the
    input by (-1)^m; the residual site-offset phase is diagonal in k and
    cancels in any forward/inverse round trip, so it is omitted.
    """
    n = amplitudes.size
    stagger = np.where(np.arange(n) % 2, -1.0, 1.0)
    return np.fft.fft(amplitudes * stagger) / math.sqrt(n)


def from_momentum(spectrum: np.ndarray) -> np.ndarray:
    """Inverse of to_momentum."""
    n = spectrum.size
    stagger = np.where(np.arange(n) % 2, -1.0, 1.0)
    return np.fft.ifft(spectrum) * math.sqrt(n) * stagger


def momentum_density(state: WaveState) -> tuple[np.ndarray, np.ndarray]:
    """(k, |psi~(k)|^2) on the uniform Brillouin-zone grid; sums to the norm."""
    spectrum = to_momentum(state.amplitudes)
    return brillouin_momenta(state.grid.n_sites), np.abs(spectrum) ** 2


def fidelity(a: WaveState, b: WaveState) -> float:
    """|<a|b>|^2 (insensitive to global phase)."""
    return float(np.abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def boundary_occupation(state: WaveState) -> float:
    """Larger of the two edge-cell densities."""
    d = state.density()
    return float(max(d[0], d[-1]))


_UNIT_SCALES = {
    "velocity": lambda d, f: d * f,
    "acceleration": lambda d, f: d * f * f,
    "time": lambda d, f: 1.0 / f,
    "length": lambda d, f: d,
}


def to_physical_units(
    quantity: float, kind: str, lattice_spacing: float, J_frequency: float
) -> float:
    """Convert a lattice-unit quantity to SI given the well spacing d (meters)
    and the tunneling frequency J (Hz): velocity scales as d*J, acceleration
    as d*J^2, time as 1/J, length as d.
    """
    if kind not in _UNIT_SCALES:
        raise DomainError(f"unknown quantity kind {kind!r}")
    if not (lattice_spacing > 0 and J_frequency > 0):
        raise DomainError("lattice_spacing and J_frequency must be positive")
    return quantity * _UNIT_SCALES[kind](lattice_spacing, J_frequency)


def save_state(state: WaveState, path) -> None:
    """Plain-text snapshot, one row per site: site_index, position, re, im, density."""
    d = state.density()
    with open(path, "w") as fh:
        fh.write("site_index,position,re,im,density\n")
        for j, amp, dens in zip(state.grid.sites(), state.amplitudes, d):
            fh.write(
                f"{j},{j * state.grid.delta_x:.9g},"
                f"{amp.real:.12e},{amp.imag:.12e},{dens:.12e}\n"
            )


def load_state(path, time: float = 0.0) -> WaveState:
    """Read a snapshot written by save_state."""
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    sites = rows[:, 0].astype(int)
    if sites.size < 2 or np.any(np.diff(sites) != 1):
        raise ConfigurationError(f"{path}: site indices are not contiguous")
    # position column is j*delta_x; recover the spacing from the nonzero sites
    nz = sites != 0
    delta_x = float(np.median(rows[nz, 1] / sites[nz]))
    grid = LatticeGrid(delta_x, int(sites[0]), int(sites[-1]))
    return WaveState(rows[:, 2] + 1j * rows[:, 3], time, grid)
