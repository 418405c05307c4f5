"""Initial-state builders: aperture-limited Airy states (two independent
constructions), Gaussian packets, and phase-imprint kicks.

The ideal Airy profile Ai(x) is not normalizable; truncating it to the finite
grid (hard aperture) or damping it with exp(gamma*x) (exponential aperture)
makes it so, at the price of a finite "Airy zone" over which the packet keeps
its shape.  All builders return unit-norm states at time 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .lattice import LatticeGrid, WaveState
from .special_functions import airy_ai

AIRY_MAIN_PEAK_X = -1.019  # location of the global maximum of Ai^2

# momentum window for Fourier synthesis: exp(-gamma*kmax^2) below this
_SPECTRUM_FLOOR = 1e-10
# largest tolerated |psi~|^2 mass beyond the synthesis window
_CLIP_TOLERANCE = 1e-6
# cap on the window, in multiples of the lattice Nyquist momentum pi/delta_x
_MAX_UPSAMPLING = 16


@dataclass(frozen=True)
class ApertureSpec:
    """Truncation that renders the Airy profile normalizable.

    kind "hard" keeps plain Ai(x) on the finite grid; kind "exponential"
    multiplies by exp(gamma*x) with gamma > 0.
    """

    kind: str = "hard"
    gamma: float = 0.0

    def __post_init__(self):
        if self.kind not in ("hard", "exponential"):
            raise ConfigurationError(f"unknown aperture kind {self.kind!r}")
        if self.kind == "exponential" and not self.gamma > 0:
            raise ConfigurationError("exponential aperture requires gamma > 0")


def _normalized(amplitudes: np.ndarray, grid: LatticeGrid) -> WaveState:
    return WaveState(amplitudes / np.linalg.norm(amplitudes), 0.0, grid)


def build_airy_state(grid: LatticeGrid, aperture: ApertureSpec | None = None) -> WaveState:
    """psi_j ~ Ai(j*delta_x) times the aperture factor, normalized."""
    aperture = aperture or ApertureSpec()
    if not grid.position(grid.j_min) <= AIRY_MAIN_PEAK_X <= grid.position(grid.j_max):
        raise ConfigurationError(
            f"grid x-range [{grid.position(grid.j_min)}, {grid.position(grid.j_max)}] "
            f"does not contain the main Airy peak at x = {AIRY_MAIN_PEAK_X}"
        )
    x = grid.positions()
    psi = np.array([airy_ai(xi) for xi in x], dtype=complex)
    if aperture.kind == "exponential":
        psi *= np.exp(aperture.gamma * x)
    return _normalized(psi, grid)


def build_airy_state_fourier(grid: LatticeGrid, gamma: float) -> WaveState:
    """Synthesize the exponential-aperture Airy state from its momentum-space
    form psi~(k) ~ exp(-gamma k^2) exp(i k^3/3) and sample it on the lattice.

    The spectrum is laid on an FFT grid whose momentum window is an integer
    multiple p of the lattice Nyquist momentum pi/delta_x (so lattice sites
    are every p-th point of the synthesis grid), with p chosen to push
    exp(-gamma k^2) below 1e-10 at the window edge.  Serves as an independent
    cross-check of build_airy_state.
    """
    if not gamma > 0:
        raise ConfigurationError("gamma must be positive")
    dx = grid.delta_x
    kmax_needed = math.sqrt(math.log(1.0 / _SPECTRUM_FLOOR) / gamma)
    p = max(1, math.ceil(kmax_needed * dx / math.pi))
    if p > _MAX_UPSAMPLING:
        p = _MAX_UPSAMPLING
        clipped = math.erfc(math.sqrt(2.0 * gamma) * p * math.pi / dx)
        if clipped > _CLIP_TOLERANCE:
            raise ConfigurationError(
                f"gamma = {gamma} needs a momentum window beyond "
                f"{_MAX_UPSAMPLING}x the lattice Nyquist momentum "
                f"(clipped spectral mass {clipped:.2e} > {_CLIP_TOLERANCE})"
            )

    guard = 100.0  # padding keeps the periodic images of the tails away
    x_lo, x_hi = grid.position(grid.j_min), grid.position(grid.j_max)
    dxf = dx / p
    span = (x_hi - x_lo) + 2.0 * guard
    m = 1 << math.ceil(math.log2(span / dxf + 1))
    dk = 2.0 * math.pi / (m * dxf)
    m0 = math.ceil((x_lo - guard) / dxf)  # fine grid is x = (m0 + i)*dxf

    k = np.fft.fftfreq(m, d=dxf) * 2.0 * math.pi
    spectrum = np.exp(-gamma * k * k) * np.exp(1j * k**3 / 3.0)
    # psi(x_i) = (dk/2pi) sum_k spectrum(k) e^{ik x_i}; the m0 offset enters as
    # a diagonal phase before the inverse FFT
    fine = np.fft.ifft(spectrum * np.exp(1j * k * m0 * dxf)) * (m * dk / (2.0 * math.pi))
    first = grid.j_min * p - m0
    psi = fine[first + p * np.arange(grid.n_sites)]
    return _normalized(psi, grid)


def build_gaussian_state(grid: LatticeGrid, center: float, width: float) -> WaveState:
    """psi_j ~ exp(-(j*delta_x - center)^2 / (4 width^2)), center and width in
    the dimensionless x coordinate."""
    if not width > 0:
        raise ConfigurationError("width must be positive")
    if width < grid.delta_x:
        raise ConfigurationError(
            f"width {width} is below the lattice spacing {grid.delta_x}; "
            "the packet would not be resolvable"
        )
    if not grid.position(grid.j_min) <= center <= grid.position(grid.j_max):
        raise ConfigurationError(f"center {center} lies outside the grid")
    x = grid.positions()
    psi = np.exp(-((x - center) ** 2) / (4.0 * width**2)).astype(complex)
    return _normalized(psi, grid)


def imprint_phase(state: WaveState, phi: float) -> WaveState:
    """Multiply by e^{i phi j}: density unchanged, momentum density shifted by
    phi, imposing velocity 2J sin(phi) on a packet at the band bottom."""
    kicked = state.amplitudes * np.exp(1j * phi * state.grid.sites())
    return WaveState(kicked, state.time, state.grid)
