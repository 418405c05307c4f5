"""Observables extracted from snapshot streams: sub-lattice peak positions,
velocity/acceleration series, momentum-peak drift, and centre of mass.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguousPeakError, DomainError, TrackingLostError
from .lattice import V_MAX, WaveState, brillouin_momenta, momentum_density

SMOOTHING_WINDOW = 5  # boxcar applied to positions before differencing


@dataclass
class PeakTrajectory:
    """Time series of sub-lattice-resolved peak positions (lattice-site units)
    with optionally derived velocity and acceleration series."""

    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray | None = None
    accelerations: np.ndarray | None = None
    peak_densities: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.positions = np.asarray(self.positions, dtype=float)
        if self.times.shape != self.positions.shape:
            raise DomainError("times and positions must have equal length")
        d = np.diff(self.times)
        if d.size and not (np.all(d > 0) or np.all(d < 0)):
            raise DomainError("times must be strictly monotonic")
        for name in ("velocities", "accelerations", "peak_densities"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.asarray(arr, dtype=float)
                if arr.shape != self.times.shape:
                    raise DomainError(f"{name} length mismatch")
                setattr(self, name, arr)

    def __len__(self):
        return self.times.size


def _parabolic_offset(dm: float, d0: float, dp: float) -> float:
    """Vertex offset of the parabola through (-1, dm), (0, d0), (+1, dp);
    0 for a degenerate flat triple."""
    den = dm - 2.0 * d0 + dp
    if abs(den) < 1e-15:
        return 0.0
    return 0.5 * (dm - dp) / den


def _refine_peak(density: np.ndarray, i: int, grid) -> float:
    if i == 0 or i == density.size - 1:
        raise DomainError(
            f"density maximum sits on the grid boundary (site {grid.j_min + i})"
        )
    off = _parabolic_offset(density[i - 1], density[i], density[i + 1])
    return grid.j_min + i + off


def find_main_peak(state: WaveState) -> float:
    """Position of the global density maximum, refined by a three-point
    parabola through the neighbouring densities.  Lattice-site units."""
    density = state.density()
    return _refine_peak(density, int(np.argmax(density)), state.grid)


class PeakTracker:
    """Incremental peak follower for snapshot streams.

    After the first snapshot the search is restricted to a window around the
    position extrapolated from the two previous points, so the tracker cannot
    hop to a neighbouring Airy lobe as the peak amplitudes decay.  The window
    is +-max(5, 3*v_max*dt) sites.
    """

    def __init__(self):
        self.times: list[float] = []
        self.positions: list[float] = []
        self.peak_densities: list[float] = []

    def feed(self, state: WaveState) -> float:
        """Locate the peak in this snapshot; returns its position (site units)."""
        grid = state.grid
        density = state.density()
        n = len(self.times)
        if n == 0:
            i = int(np.argmax(density))
            pos = _refine_peak(density, i, grid)
        else:
            dt = abs(state.time - self.times[-1])
            window = max(5.0, 3.0 * V_MAX * dt)
            if n == 1:
                expected = self.positions[0]
            else:
                expected = 2.0 * self.positions[-1] - self.positions[-2]
            lo = max(0, int(np.floor(expected - grid.j_min - window)))
            hi = min(density.size, int(np.ceil(expected - grid.j_min + window)) + 1)
            if hi - lo < 3:
                raise TrackingLostError(
                    f"search window empty at t = {state.time}", last_good_index=n - 1
                )
            i = lo + int(np.argmax(density[lo:hi]))
            if (i == lo and lo > 0) or (i == hi - 1 and hi < density.size):
                # maximum sits on the window edge: the peak left the window
                raise TrackingLostError(
                    f"no peak inside the continuity window at t = {state.time}",
                    last_good_index=n - 1,
                )
            pos = _refine_peak(density, i, grid)
            if abs(pos - self.positions[-1]) > window:
                raise TrackingLostError(
                    f"peak jumped {abs(pos - self.positions[-1]):.1f} sites "
                    f"at t = {state.time}",
                    last_good_index=n - 1,
                )
        self.times.append(float(state.time))
        self.positions.append(pos)
        self.peak_densities.append(float(density[i]))
        return pos

    def trajectory(self) -> PeakTrajectory:
        return PeakTrajectory(
            np.array(self.times),
            np.array(self.positions),
            peak_densities=np.array(self.peak_densities),
        )


def track_peak(snapshots: list[WaveState]) -> PeakTrajectory:
    """Follow the main peak through a snapshot sequence (see PeakTracker)."""
    if len(snapshots) < 2:
        raise DomainError("need at least two snapshots to track")
    tracker = PeakTracker()
    for snap in snapshots:
        tracker.feed(snap)
    return tracker.trajectory()


def _boxcar(values: np.ndarray, window: int) -> np.ndarray:
    """Centred boxcar of constant width; the series is extended at both ends
    by quadratic extrapolation so every point sees a full window.  A constant
    window adds the same offset to every point of a locally quadratic series,
    which keeps first and second differences exact for parabolas."""
    half = window // 2
    x = np.empty(values.size + 2 * half)
    x[half:-half] = values
    for p in range(half):
        # x[-1-p] via the 3-term quadratic extrapolation 3a - 3b + c
        left = x[half - p : half - p + 3]
        x[half - p - 1] = 3.0 * left[0] - 3.0 * left[1] + left[2]
        right = x[-half + p - 3 : -half + p]
        x[-half + p] = 3.0 * right[2] - 3.0 * right[1] + right[0]
    kernel = np.full(window, 1.0 / window)
    return np.convolve(x, kernel, mode="valid")


def differentiate(series: PeakTrajectory, order: int) -> PeakTrajectory:
    """Fill velocity (order 1) or velocity and acceleration (order 2) by
    central differences of boxcar-smoothed positions; one-sided second-order
    differences at the endpoints.  Exact for quadratic trajectories."""
    if order not in (1, 2):
        raise DomainError("order must be 1 or 2")
    n = len(series)
    if n < (3 if order == 1 else 5):
        raise DomainError(f"need at least {3 if order == 1 else 5} points")
    steps = np.diff(series.times)
    dt = steps[0]
    if np.max(np.abs(steps - dt)) > 1e-9 * max(1.0, abs(dt)):
        raise DomainError("time grid must be uniform")

    x = _boxcar(series.positions, SMOOTHING_WINDOW)
    v = np.empty(n)
    v[1:-1] = (x[2:] - x[:-2]) / (2.0 * dt)
    v[0] = (-3.0 * x[0] + 4.0 * x[1] - x[2]) / (2.0 * dt)
    v[-1] = (3.0 * x[-1] - 4.0 * x[-2] + x[-3]) / (2.0 * dt)

    a = None
    if order == 2:
        a = np.empty(n)
        a[1:-1] = (x[2:] - 2.0 * x[1:-1] + x[:-2]) / dt**2
        a[0] = (x[0] - 2.0 * x[1] + x[2]) / dt**2
        a[-1] = (x[-1] - 2.0 * x[-2] + x[-3]) / dt**2

    return PeakTrajectory(
        series.times.copy(),
        series.positions.copy(),
        velocities=v,
        accelerations=a,
        peak_densities=None
        if series.peak_densities is None
        else series.peak_densities.copy(),
    )


def _momentum_peak(state: WaveState) -> float:
    k, density = momentum_density(state)
    n = density.size
    dk = 2.0 * np.pi / n
    i = int(np.argmax(density))
    peak = density[i]
    if peak < 2.0 * np.median(density):
        raise AmbiguousPeakError(
            f"momentum density too flat at t = {state.time}", candidates=[]
        )
    # competing maxima: local maxima at least half the global one, outside the
    # immediate neighbourhood of the winner (periodic indexing)
    left = np.roll(density, 1)
    right = np.roll(density, -1)
    local_max = (density >= left) & (density >= right) & (density >= 0.5 * peak)
    rivals = [
        float(k[m])
        for m in np.nonzero(local_max)[0]
        if min(abs(m - i), n - abs(m - i)) > 2
    ]
    if rivals:
        raise AmbiguousPeakError(
            f"momentum density multimodal at t = {state.time}",
            candidates=[float(k[i])] + rivals,
        )
    off = _parabolic_offset(density[(i - 1) % n], peak, density[(i + 1) % n])
    return float(k[i] + off * dk)


def momentum_peak_drift(
    snapshots: list[WaveState],
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(times, k_peak wrapped to [-pi, pi), k_peak unwrapped across the zone
    boundary) with parabolic sub-bin refinement per snapshot."""
    times = np.array([s.time for s in snapshots])
    wrapped = np.array([_momentum_peak(s) for s in snapshots])
    unwrapped = np.unwrap(wrapped)
    return times, wrapped, unwrapped


def center_of_mass(state: WaveState) -> float:
    """sum_j j |psi_j|^2 in lattice-site units."""
    return float(np.sum(state.grid.sites() * state.density()))


def save_trajectory(traj: PeakTrajectory, path) -> None:
    """Plain-text rows t, position, velocity, acceleration (empty when absent)."""
    v = traj.velocities
    a = traj.accelerations
    with open(path, "w") as fh:
        fh.write("t,position,velocity,acceleration\n")
        for i, (t, x) in enumerate(zip(traj.times, traj.positions)):
            vs = f"{v[i]:.9e}" if v is not None else ""
            as_ = f"{a[i]:.9e}" if a is not None else ""
            fh.write(f"{t:.9g},{x:.9e},{vs},{as_}\n")


def load_trajectory(path) -> PeakTrajectory:
    rows = np.genfromtxt(path, delimiter=",", skip_header=1, filling_values=np.nan)
    rows = np.atleast_2d(rows)
    v = rows[:, 2] if rows.shape[1] > 2 and not np.all(np.isnan(rows[:, 2])) else None
    a = rows[:, 3] if rows.shape[1] > 3 and not np.all(np.isnan(rows[:, 3])) else None
    return PeakTrajectory(rows[:, 0], rows[:, 1], velocities=v, accelerations=a)
