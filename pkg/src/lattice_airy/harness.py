"""Scenario registry and end-to-end experiment runner.

Each scenario builds an initial state, streams snapshots through the
diagnostics, guards the grid boundaries, and writes delimited-text artifacts:

    density.csv     t, site, density          (density-map cadence)
    trajectory.csv  t, position, velocity, acceleration
    momentum.csv    t, k, density             (bloch only)
    fit.txt         alpha / c / rms / method  (airy-fit, summary)
    summary.csv     t, v_continuum, v_relativistic, v_bloch, v_measured
    meta.txt        key = value echo of the full configuration

All scenarios are deterministic: identical configurations produce
byte-identical numeric output.
"""

from __future__ import annotations

import math
import time as _walltime
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import (
    PeakTracker,
    PeakTrajectory,
    center_of_mass,
    differentiate,
    momentum_peak_drift,
    save_trajectory,
)
from .errors import BoundaryBreachError, ConfigurationError
from .fitting import RelativisticFit, fit_hyperbolic, predict_relativistic
from .lattice import V_MAX, LatticeGrid, WaveState, brillouin_momenta, momentum_density
from .propagators import (
    DriveSchedule,
    TiltSpec,
    default_drive_dt,
    DEFAULT_FREE_DT,
    iterate_free,
    iterate_gauged,
    snapshot_times,
)
from .states import ApertureSpec, build_airy_state, build_gaussian_state, imprint_phase

SCENARIOS = ("airy-free", "airy-fit", "scaling-sweep", "bloch", "driven", "summary")

BOUNDARY_THRESHOLD = 1e-8
PEAK_DENSITY_FLOOR = 0.2  # fit window ends when the peak decays below this fraction

DEFAULT_DX = 0.2
DEFAULT_T_MAX = 300.0
DEFAULT_SNAPSHOT_INTERVAL = 0.25
DEFAULT_DENSITY_INTERVAL = 1.0
DEFAULT_X_MIN = -500.0
DEFAULT_BLOCH_V0 = 2.0 * math.pi / 1000.0
DEFAULT_BLOCH_WIDTH = 10.0  # x-units (50 sites at dx = 0.2)
DEFAULT_KICK_PHI = 1.45
DEFAULT_OMEGA = 2.0 * math.pi
DEFAULT_DRIVEN_SEGMENTS = ((0.0, 0.5), (30.0, 1.691), (60.0, 0.5))
DEFAULT_DRIVEN_T_MAX = 90.0
SWEEP_DX_LIST = (0.2, 0.15, 0.1, 0.05)
SEGMENT_FIT_MARGIN = 2.0  # time units trimmed at segment edges for velocity fits


@dataclass
class ScenarioConfig:
    """Fully explicit description of one run; validate() checks that exactly
    the fields the scenario needs are present."""

    scenario: str
    dx: float = DEFAULT_DX
    grid: tuple[int, int] | None = None  # (j_min, j_max); derived when None
    aperture: ApertureSpec = field(default_factory=ApertureSpec)
    t_max: float = DEFAULT_T_MAX
    dt: float = DEFAULT_FREE_DT
    snapshot_interval: float = DEFAULT_SNAPSHOT_INTERVAL
    density_interval: float = DEFAULT_DENSITY_INTERVAL
    drive: DriveSchedule | None = None
    tilt: TiltSpec | None = None
    kick_phi: float | None = None
    gaussian_width: float | None = None

    def validate(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ConfigurationError(f"unknown scenario {self.scenario!r}")
        if self.scenario == "scaling-sweep":
            raise ConfigurationError("the scaling sweep runs through sweep_scaling()")
        if not (self.dx > 0 and self.t_max > 0):
            raise ConfigurationError("dx and t_max must be positive")
        if not (0 < self.snapshot_interval <= self.density_interval):
            raise ConfigurationError(
                "need 0 < snapshot_interval <= density_interval"
            )
        stride = self.density_interval / self.snapshot_interval
        if abs(stride - round(stride)) > 1e-9:
            raise ConfigurationError(
                "density_interval must be a multiple of snapshot_interval"
            )
        n_snap = self.t_max / self.snapshot_interval
        if abs(n_snap - round(n_snap)) > 1e-9:
            raise ConfigurationError(
                "t_max must be a multiple of snapshot_interval "
                "(the trajectory needs a uniform time grid)"
            )
        needs = {
            "airy-free": (),
            "airy-fit": (),
            "driven": ("drive", "kick_phi"),
            "bloch": ("tilt", "gaussian_width"),
            "summary": ("tilt",),
        }[self.scenario]
        for name in ("drive", "tilt", "kick_phi", "gaussian_width"):
            have = getattr(self, name) is not None
            if have and name not in needs:
                raise ConfigurationError(
                    f"field {name!r} is not used by scenario {self.scenario!r}"
                )
            if not have and name in needs:
                raise ConfigurationError(
                    f"scenario {self.scenario!r} requires field {name!r}"
                )
        if self.grid is not None:
            LatticeGrid(self.dx, *self.grid)  # raises if inconsistent

    def resolved_grid(self) -> LatticeGrid:
        if self.grid is not None:
            return LatticeGrid(self.dx, *self.grid)
        return LatticeGrid(self.dx, *_derived_grid(self))


def _derived_grid(cfg: ScenarioConfig) -> tuple[int, int]:
    """Size the grid so the corruption cone from the grid edges cannot reach
    the tracked packet within t_max (see _BoundaryGuard)."""
    dx = cfg.dx
    if cfg.scenario == "bloch":
        amp_sites = 4.0 / abs(cfg.tilt.V0)
        margin = 8.0 * cfg.gaussian_width / dx + 10.0
        return (int(-margin), int(math.ceil(amp_sites + margin)))
    if cfg.scenario == "driven":
        # kicked packet: |velocity| <= v_max in every segment
        reach = V_MAX * cfg.t_max
        j_max = int(math.ceil(2.0 * reach + 60.0))
        return (int(round(DEFAULT_X_MIN / dx)), j_max)
    # free Airy runs: worldline estimate with alpha = 2 dx^3, c = v_max
    n_est = predict_relativistic(2.0 * dx**3, V_MAX, cfg.t_max)[0]
    j_max = int(math.ceil(n_est + V_MAX * cfg.t_max + 60.0))
    return (int(round(DEFAULT_X_MIN / dx)), j_max)


def default_config(scenario: str, **overrides) -> ScenarioConfig:
    """Scenario defaults pinned to the reference parameters: dx = 0.2,
    Bloch tilt 2*pi/1000 on a broad Gaussian, drive omega = 2*pi with segment
    boundaries at t = 30 and 60, kick phi = 1.45."""
    cfg = ScenarioConfig(scenario=scenario)
    if scenario == "bloch":
        cfg.tilt = TiltSpec(DEFAULT_BLOCH_V0)
        cfg.gaussian_width = DEFAULT_BLOCH_WIDTH
        cfg.t_max = 1000.0
    elif scenario == "driven":
        cfg.drive = DriveSchedule(DEFAULT_OMEGA, DEFAULT_DRIVEN_SEGMENTS)
        cfg.kick_phi = DEFAULT_KICK_PHI
        cfg.t_max = DEFAULT_DRIVEN_T_MAX
        cfg.dt = default_drive_dt(DEFAULT_OMEGA)
    elif scenario == "summary":
        cfg.tilt = TiltSpec(DEFAULT_BLOCH_V0)
    for name, value in overrides.items():
        if not hasattr(cfg, name):
            raise ConfigurationError(f"unknown configuration field {name!r}")
        setattr(cfg, name, value)
    if scenario == "driven" and "dt" not in overrides and cfg.drive is not None:
        cfg.dt = default_drive_dt(cfg.drive.omega)
    return cfg


class _BoundaryGuard:
    """Aborts a run whose grid turned out too small.

    For a state that starts with both edge cells empty (< 1e-8) the edges must
    stay empty.  An aperture-limited state (the hard aperture truncates the
    Airy tail mid-amplitude at the left edge) cannot satisfy any threshold:
    the cut itself occupies one edge, and the momentum-space propagator is
    periodic, so the cut leaks across the grid junction to the other edge
    immediately.  Such runs are guarded by the corruption cone instead: edge
    artifacts travel inward no faster than v_max from either edge, and the run
    aborts as soon as the cone would touch the tracked peak.
    """

    def __init__(self, state: WaveState):
        d = state.density()
        self.t0 = state.time
        self.aperture_limited = max(d[0], d[-1]) >= BOUNDARY_THRESHOLD
        self.grid = state.grid

    def check(self, state: WaveState, peak_position: float) -> None:
        t = state.time
        if self.aperture_limited:
            gap = min(
                peak_position - self.grid.j_min, self.grid.j_max - peak_position
            )
            if gap <= V_MAX * (t - self.t0):
                raise BoundaryBreachError(
                    f"edge corruption cone reached the peak at t = {t:g}: "
                    "grid too small",
                    time=t,
                )
            return
        d = state.density()
        for side, dens in (("left", d[0]), ("right", d[-1])):
            if dens >= BOUNDARY_THRESHOLD:
                raise BoundaryBreachError(
                    f"{side} boundary occupation {dens:.3e} at t = {t:g}: "
                    "grid too small",
                    time=t,
                )


@dataclass
class DensityMap:
    """Dense (t, site|k, value) table kept as arrays, written as rows sorted
    by time then column index."""

    times: np.ndarray
    columns: np.ndarray
    values: np.ndarray  # shape (len(times), len(columns))

    def write(self, path, col_name: str) -> None:
        with open(path, "w") as fh:
            fh.write(f"t,{col_name},density\n")
            for t, row in zip(self.times, self.values):
                prefix = f"{t:.9g},"
                fh.write(
                    "".join(
                        f"{prefix}{c:.9g},{v:.6e}\n"
                        for c, v in zip(self.columns, row)
                    )
                )


@dataclass
class RunArtifact:
    """Everything one scenario produced, plus the metadata to rerun it."""

    config: ScenarioConfig
    density_map: DensityMap
    trajectory: PeakTrajectory
    momentum_map: DensityMap | None = None
    fit: RelativisticFit | None = None
    extras: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)


def _metadata(cfg: ScenarioConfig, grid: LatticeGrid, wall: float) -> dict:
    meta = {
        "scenario": cfg.scenario,
        "dx": cfg.dx,
        "j_min": grid.j_min,
        "j_max": grid.j_max,
        "n_sites": grid.n_sites,
        "t_max": cfg.t_max,
        "dt": cfg.dt,
        "snapshot_interval": cfg.snapshot_interval,
        "density_interval": cfg.density_interval,
        "aperture_kind": cfg.aperture.kind,
        "aperture_gamma": cfg.aperture.gamma,
        "version": __version__,
        "wall_time_s": round(wall, 3),
    }
    if cfg.drive is not None:
        meta["omega"] = cfg.drive.omega
        meta["schedule"] = ",".join(f"{t:g}:{k:g}" for t, k in cfg.drive.segments)
    if cfg.kick_phi is not None:
        meta["kick_phi"] = cfg.kick_phi
    if cfg.tilt is not None:
        meta["v0"] = cfg.tilt.V0
    if cfg.gaussian_width is not None:
        meta["gaussian_width"] = cfg.gaussian_width
    return meta


def _initial_state(cfg: ScenarioConfig, grid: LatticeGrid) -> WaveState:
    if cfg.scenario == "bloch":
        return build_gaussian_state(grid, 0.0, cfg.gaussian_width)
    state = build_airy_state(grid, cfg.aperture)
    if cfg.scenario == "driven":
        state = imprint_phase(state, cfg.kick_phi)
    return state


def _snapshot_iter(cfg: ScenarioConfig, state: WaveState, times: np.ndarray):
    if cfg.scenario == "driven":
        return iterate_gauged(state, cfg.drive, times, cfg.dt)
    if cfg.scenario == "bloch":
        return iterate_gauged(state, cfg.tilt, times, cfg.dt)
    return iterate_free(state, times)


def _fit_window(traj: PeakTrajectory) -> PeakTrajectory:
    """Clip the trajectory where wavepacket spreading has degraded the peak
    below 20% of its initial density."""
    dens = traj.peak_densities
    if dens is None:
        return traj
    bad = np.nonzero(dens < PEAK_DENSITY_FLOOR * dens[0])[0]
    if bad.size == 0:
        return traj
    cut = int(bad[0])
    return PeakTrajectory(
        traj.times[:cut],
        traj.positions[:cut],
        peak_densities=dens[:cut],
    )


def segment_velocities(
    traj: PeakTrajectory, schedule: DriveSchedule, t_max: float
) -> list[float]:
    """Straight-line peak velocity inside each drive segment, trimmed by a
    small margin so boundary transients do not enter the fit."""
    out = []
    starts = [t for t, _ in schedule.segments]
    for t0, t1 in zip(starts, starts[1:] + [t_max]):
        mask = (traj.times >= t0 + SEGMENT_FIT_MARGIN) & (
            traj.times <= t1 - SEGMENT_FIT_MARGIN
        )
        if np.count_nonzero(mask) < 2:
            out.append(math.nan)
            continue
        out.append(float(np.polyfit(traj.times[mask], traj.positions[mask], 1)[0]))
    return out


def _run_core(cfg: ScenarioConfig) -> RunArtifact:
    cfg.validate()
    started = _walltime.perf_counter()
    grid = cfg.resolved_grid()
    state0 = _initial_state(cfg, grid)
    times = snapshot_times(0.0, cfg.t_max, cfg.snapshot_interval)
    stride = int(round(cfg.density_interval / cfg.snapshot_interval))

    guard = _BoundaryGuard(state0)
    tracker = PeakTracker()
    density_rows: list[np.ndarray] = []
    density_times: list[float] = []
    momentum_rows: list[np.ndarray] = []
    com_series: list[float] = []
    kept_snapshots: list[WaveState] = []

    want_momentum = cfg.scenario == "bloch"
    for i, snap in enumerate(_snapshot_iter(cfg, state0, times)):
        pos = tracker.feed(snap)
        guard.check(snap, pos)
        if cfg.scenario == "bloch":
            com_series.append(center_of_mass(snap))
            kept_snapshots.append(snap)
        if i % stride == 0 or i == times.size - 1:
            density_times.append(snap.time)
            density_rows.append(snap.density())
            if want_momentum:
                momentum_rows.append(momentum_density(snap)[1])

    traj = differentiate(tracker.trajectory(), order=2)
    density_map = DensityMap(
        np.array(density_times), grid.sites(), np.array(density_rows)
    )

    momentum_map = None
    extras: dict = {}
    fit = None
    if want_momentum:
        momentum_map = DensityMap(
            np.array(density_times),
            brillouin_momenta(grid.n_sites),
            np.array(momentum_rows),
        )
        drift_t, wrapped, unwrapped = momentum_peak_drift(kept_snapshots)
        extras["com"] = np.array(com_series)
        extras["com_reference_v0"] = cfg.tilt.V0
        extras["momentum_drift"] = (drift_t, wrapped, unwrapped)
    if cfg.scenario in ("airy-fit", "summary"):
        window = _fit_window(traj)
        fit = fit_hyperbolic(window)
        extras["fit_window_t_max"] = float(window.times[-1])
    if cfg.scenario == "driven":
        extras["segment_velocities"] = segment_velocities(traj, cfg.drive, cfg.t_max)

    wall = _walltime.perf_counter() - started
    return RunArtifact(
        config=cfg,
        density_map=density_map,
        trajectory=traj,
        momentum_map=momentum_map,
        fit=fit,
        extras=extras,
        metadata=_metadata(cfg, grid, wall),
    )


def _write_meta(meta: dict, path) -> None:
    with open(path, "w") as fh:
        for key, value in meta.items():
            fh.write(f"{key} = {value}\n")


def run_scenario(cfg: ScenarioConfig, output_dir) -> RunArtifact:
    """Run one scenario end to end and write its artifact files."""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    artifact = _run_core(cfg)

    artifact.density_map.write(out / "density.csv", "site")
    save_trajectory(artifact.trajectory, out / "trajectory.csv")
    if artifact.momentum_map is not None:
        artifact.momentum_map.write(out / "momentum.csv", "k")
    if artifact.fit is not None:
        (out / "fit.txt").write_text(artifact.fit.summary())

    if cfg.scenario == "summary":
        _write_summary_curves(artifact, out / "summary.csv")
    if cfg.scenario == "driven":
        for n, v in enumerate(artifact.extras["segment_velocities"]):
            artifact.metadata[f"segment_velocity_{n}"] = f"{v:.6g}"

    _write_meta(artifact.metadata, out / "meta.txt")
    return artifact


def _write_summary_curves(artifact: RunArtifact, path) -> None:
    """The three forms of motion on one time axis: unbounded continuum
    acceleration, relativistic saturation toward v_max, and Bloch oscillation."""
    fit = artifact.fit
    v0 = artifact.config.tilt.V0
    t = artifact.trajectory.times
    v_meas = artifact.trajectory.velocities
    alpha, c = fit.alpha, (fit.c if math.isfinite(fit.c) else V_MAX)
    v_rel = predict_relativistic(alpha, c, t)[1]
    with open(path, "w") as fh:
        fh.write("t,v_continuum,v_relativistic,v_bloch,v_measured\n")
        for i, ti in enumerate(t):
            fh.write(
                f"{ti:.9g},{alpha * ti:.9e},{v_rel[i]:.9e},"
                f"{V_MAX * math.sin(v0 * ti):.9e},{v_meas[i]:.9e}\n"
            )


def sweep_t_max(dx: float, interval: float = DEFAULT_SNAPSHOT_INTERVAL) -> float:
    """Usable time window per spacing: the peak stays sharp longer on finer
    lattices (the aperture is fixed in x), so the window grows as dx shrinks;
    the cap keeps the finest lattice in the non-relativistic regime as in the
    reference data.  Rounded to the snapshot cadence."""
    t = min(900.0, 300.0 * (DEFAULT_DX / dx) ** 1.5)
    return round(t / interval) * interval


def sweep_scaling(dx_list, output_dir) -> dict:
    """Run airy-fit per spacing, assemble the (dx, c, alpha) table, and regress
    the power law alpha(dx).  Failed members leave an error marker in their
    row instead of aborting the sweep."""
    from .fitting import fit_scaling
    from .errors import LatticeAiryError, DomainError

    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for dx in dx_list:
        if not (isinstance(dx, (int, float)) and math.isfinite(dx) and dx > 0):
            rows.append(
                {"dx": dx, "error": f"ConfigurationError: invalid spacing {dx!r}"}
            )
            continue
        cfg = default_config("airy-fit", dx=dx, t_max=sweep_t_max(dx))
        try:
            artifact = run_scenario(cfg, out / f"dx_{dx:g}")
            rows.append(
                {
                    "dx": dx,
                    "c": artifact.fit.c,
                    "alpha": artifact.fit.alpha,
                    "method": artifact.fit.method,
                }
            )
        except LatticeAiryError as exc:
            rows.append({"dx": dx, "error": f"{type(exc).__name__}: {exc}"})

    with open(out / "scaling.csv", "w") as fh:
        fh.write("dx,c,alpha,method\n")
        for row in rows:
            if "error" in row:
                fh.write(f"{row['dx']:.9g},,,error:{row['error']}\n")
            else:
                c_txt = f"{row['c']:.9g}" if math.isfinite(row["c"]) else ""
                fh.write(
                    f"{row['dx']:.9g},{c_txt},{row['alpha']:.9g},{row['method']}\n"
                )

    points = [(r["dx"], r["alpha"]) for r in rows if "alpha" in r]
    result: dict = {"rows": rows, "scaling": None}
    try:
        exponent, prefactor = fit_scaling(points)
        result["scaling"] = (exponent, prefactor)
        text = f"exponent = {exponent:.9g}\nprefactor = {prefactor:.9g}\n"
    except DomainError as exc:
        text = f"error = {exc}\n"
    (out / "scaling_fit.txt").write_text(text)
    return result
