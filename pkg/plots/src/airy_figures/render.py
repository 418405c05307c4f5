"""The seven figure builders.

Each figure reads the artifact files of one or more simulation run
directories (as written by the `lattice-airy` CLI), never modifying them, and
draws in a common house style with axes labelled in lattice units (positions
in sites or the dimensionless x coordinate, times in 1/J).

    fig1  initial Airy density profile        <- airy run
    fig2  density heatmap with parabola mark  <- airy run
    fig3  position/velocity/acceleration fit  <- fit run
    fig4  effective tunneling and index       <- no input
    fig5  Bloch oscillation, x and k space    <- bloch run
    fig6  driven-lattice trajectories         <- 1..3 driven runs
    fig7  three forms of motion (velocities)  <- summary run
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from scipy.special import j0 as bessel_j0

from .io import InputError, read_fit, read_map, read_table

FIGURE_IDS = tuple(f"fig{n}" for n in range(1, 8))

RASTER_CELL_LIMIT = 1_000_000  # rasterize heatmaps beyond this many cells
HEATMAP_CROP_FLOOR = 1e-5  # relative density below which columns are cropped

# marked drive amplitudes: slight slowdown, strong slowdown, frozen, reversed
K0_MARKS = (0.5, 1.691, 2.4048, 3.80)


@dataclass
class PlotJob:
    """One figure request: which figure, which run directories, where to."""

    figure_id: str
    input_paths: list = field(default_factory=list)
    output_path: str | Path = "figure.png"

    def __post_init__(self):
        if self.figure_id not in FIGURE_IDS:
            raise InputError(
                f"unknown figure {self.figure_id!r}; expected one of {FIGURE_IDS}"
            )
        self.input_paths = [Path(p) for p in self.input_paths]
        self.output_path = Path(self.output_path)


def _read_meta(run_dir: Path) -> dict:
    path = run_dir / "meta.txt"
    if not path.is_file():
        raise InputError(f"input file {path} does not exist")
    meta = {}
    for line in path.read_text().splitlines():
        key, _, value = line.partition("=")
        if _:
            meta[key.strip()] = value.strip()
    return meta


def _one_dir(job: PlotJob) -> Path:
    if len(job.input_paths) != 1:
        raise InputError(f"{job.figure_id} expects exactly one run directory")
    return job.input_paths[0]


def _crop_columns(cols, values):
    keep = np.nonzero(values.max(axis=0) >= HEATMAP_CROP_FLOOR * values.max())[0]
    lo = max(0, keep[0] - 5)
    hi = min(cols.size, keep[-1] + 6)
    return cols[lo:hi], values[:, lo:hi]


def _heatmap(ax, times, cols, values):
    rasterize = times.size * cols.size > RASTER_CELL_LIMIT
    mesh = ax.pcolormesh(
        times,
        cols,
        (values / values.max()).T,
        cmap="inferno",
        rasterized=rasterize,
        shading="nearest",
    )
    return mesh


def fig1_initial_profile(job: PlotJob):
    run = _one_dir(job)
    dx = float(_read_meta(run)["dx"])
    times, sites, values = read_map(run / "density.csv", "site")
    profile = values[0]
    x = sites * dx
    keep = x <= 10.0
    figure, ax = plt.subplots(figsize=(6.0, 3.6), constrained_layout=True)
    ax.plot(x[keep], profile[keep] / profile.max(), lw=1.0)
    ax.axvline(-1.019, ls=":", lw=0.8, color="gray")
    ax.set_xlim(-40.0, 10.0)
    ax.set_xlabel("x")
    ax.set_ylabel("normalized density")
    ax.set_title(f"aperture-limited Airy profile at t = {times[0]:g}")
    return figure


def fig2_density_trajectory(job: PlotJob):
    run = _one_dir(job)
    dx = float(_read_meta(run)["dx"])
    times, sites, values = read_map(run / "density.csv", "site")
    sites, values = _crop_columns(sites, values)
    figure, ax = plt.subplots(figsize=(6.0, 4.2), constrained_layout=True)
    mesh = _heatmap(ax, times, sites, values)
    # uniform-acceleration reference for the main peak, n(t) = n0 + dx^3 t^2
    n0 = sites[np.argmax(values[0])]
    ax.plot(times, n0 + dx**3 * times**2, "w--", lw=1.0)
    ax.set_ylim(sites[0], sites[-1])
    ax.set_xlabel("t (1/J)")
    ax.set_ylabel("site")
    figure.colorbar(mesh, ax=ax, label="density / max")
    return figure


def _worldline(alpha, c, t):
    s = np.sqrt(1.0 + (alpha * t / c) ** 2)
    return (c * c / alpha) * (s - 1.0), alpha * t / s, alpha / s**3


def fig3_relativistic_fit(job: PlotJob):
    run = _one_dir(job)
    traj = read_table(
        run / "trajectory.csv", ["t", "position", "velocity", "acceleration"]
    )
    fit = read_fit(run / "fit.txt")
    alpha, c = fit["alpha"], fit["c"]
    if not np.isfinite(c):
        c = 2.0  # parabola fallback: draw the theoretical light speed
    t = traj["t"]
    x0 = traj["position"][0]
    x_model, v_model, a_model = _worldline(alpha, c, t)

    figure, axes = plt.subplots(
        3, 1, figsize=(6.0, 8.4), sharex=True, constrained_layout=True
    )
    stride = max(1, t.size // 60)
    axes[0].plot(t[::stride], traj["position"][::stride] - x0, "o", ms=3.0, mfc="none")
    axes[0].plot(t, x_model, "-", lw=1.2, label="uniform proper acceleration")
    axes[0].plot(t, 0.5 * alpha * t**2, "--", lw=1.0, label="parabola (non-relativistic)")
    axes[0].set_ylabel("peak position (sites)")
    axes[0].legend(frameon=False, fontsize=8)

    axes[1].plot(t[::stride], traj["velocity"][::stride], "o", ms=3.0, mfc="none")
    axes[1].plot(t, v_model, "-", lw=1.2)
    axes[1].axhline(2.0, ls="--", lw=1.0, color="gray")  # v_max = 2J
    axes[1].set_ylabel("velocity (sites J)")

    axes[2].plot(t[::stride], traj["acceleration"][::stride], "o", ms=3.0, mfc="none")
    axes[2].plot(t, a_model, "-", lw=1.2)
    axes[2].axhline(alpha, ls="--", lw=1.0, color="gray")  # constant proper accel
    axes[2].set_ylabel("acceleration (sites J$^2$)")
    axes[2].set_xlabel("t (1/J)")
    return figure


def fig4_effective_tunneling(job: PlotJob):
    if job.input_paths:
        raise InputError("fig4 takes no simulation input")
    k0 = np.linspace(0.0, 5.0, 1001)
    j_eff = bessel_j0(k0)
    figure, axes = plt.subplots(
        2, 1, figsize=(6.0, 6.0), sharex=True, constrained_layout=True
    )
    axes[0].plot(k0, j_eff, lw=1.2)
    axes[0].axhline(0.0, lw=0.6, color="gray")
    axes[0].plot(K0_MARKS, bessel_j0(np.array(K0_MARKS)), "o", ms=5.0)
    axes[0].set_ylabel(r"$J_\mathrm{eff} / J$")

    index = 1.0 / j_eff
    index[np.abs(j_eff) < 5e-3] = np.nan  # diverges at the Bessel root
    axes[1].plot(k0, index, lw=1.2)
    axes[1].plot(K0_MARKS[:2], 1.0 / bessel_j0(np.array(K0_MARKS[:2])), "o", ms=5.0)
    axes[1].plot(K0_MARKS[3:], 1.0 / bessel_j0(np.array(K0_MARKS[3:])), "o", ms=5.0)
    axes[1].axvspan(2.4048, 5.0, alpha=0.15, color="gray")  # negative index region
    axes[1].set_ylim(-12.0, 12.0)
    axes[1].set_ylabel("refractive index")
    axes[1].set_xlabel(r"$K_0 = K/\omega$")
    for ax in axes:
        for mark in K0_MARKS:
            ax.axvline(mark, ls=":", lw=0.5, color="gray")
    return figure


def fig5_bloch(job: PlotJob):
    run = _one_dir(job)
    t_x, sites, dens_x = read_map(run / "density.csv", "site")
    t_k, momenta, dens_k = read_map(run / "momentum.csv", "k")
    sites, dens_x = _crop_columns(sites, dens_x)
    figure, axes = plt.subplots(
        2, 1, figsize=(6.0, 6.6), sharex=True, constrained_layout=True
    )
    mesh0 = _heatmap(axes[0], t_x, sites, dens_x)
    axes[0].set_ylabel("site")
    figure.colorbar(mesh0, ax=axes[0], label="density / max")
    mesh1 = _heatmap(axes[1], t_k, momenta, dens_k)
    axes[1].set_ylabel("k")
    axes[1].set_xlabel("t (1/J)")
    figure.colorbar(mesh1, ax=axes[1], label="density / max")
    return figure


def fig6_driven(job: PlotJob):
    if not 1 <= len(job.input_paths) <= 3:
        raise InputError("fig6 expects one to three driven run directories")
    figure, axes = plt.subplots(
        1,
        len(job.input_paths),
        figsize=(3.4 * len(job.input_paths), 4.2),
        sharey=True,
        constrained_layout=True,
        squeeze=False,
    )
    for ax, run in zip(axes[0], job.input_paths):
        meta = _read_meta(run)
        times, sites, values = read_map(run / "density.csv", "site")
        sites, values = _crop_columns(sites, values)
        _heatmap(ax, times, sites, values)
        segments = [
            float(piece.split(":")[0]) for piece in meta["schedule"].split(",")
        ]
        mid_k0 = meta["schedule"].split(",")[1].split(":")[1] if len(segments) > 1 else ""
        for boundary in segments[1:]:
            ax.axvline(boundary, ls="--", lw=0.9, color="w")
        ax.set_xlabel("t (1/J)")
        ax.set_title(f"$K_0$ = {mid_k0}" if mid_k0 else "constant drive", fontsize=9)
    axes[0][0].set_ylabel("site")
    return figure


def fig7_summary(job: PlotJob):
    run = _one_dir(job)
    table = read_table(
        run / "summary.csv",
        ["t", "v_continuum", "v_relativistic", "v_bloch", "v_measured"],
    )
    figure, ax = plt.subplots(figsize=(6.0, 4.0), constrained_layout=True)
    t = table["t"]
    stride = max(1, t.size // 80)
    ax.plot(t, table["v_continuum"], "--", lw=1.1, label="continuum (unbounded)")
    ax.plot(t, table["v_relativistic"], lw=1.3, label="lattice (relativistic)")
    ax.plot(t, table["v_bloch"], lw=1.1, label="tilted lattice (Bloch)")
    ax.plot(
        t[::stride], table["v_measured"][::stride], "o", ms=2.5, mfc="none",
        label="measured peak velocity",
    )
    ax.axhline(2.0, ls=":", lw=0.8, color="gray")
    ax.set_ylim(-2.4, 3.2)
    ax.set_xlabel("t (1/J)")
    ax.set_ylabel("velocity (sites J)")
    ax.legend(frameon=False, fontsize=8)
    return figure


_BUILDERS = {
    "fig1": fig1_initial_profile,
    "fig2": fig2_density_trajectory,
    "fig3": fig3_relativistic_fit,
    "fig4": fig4_effective_tunneling,
    "fig5": fig5_bloch,
    "fig6": fig6_driven,
    "fig7": fig7_summary,
}

# metadata pinned so identical inputs produce identical bytes
_DETERMINISTIC_METADATA = {
    ".pdf": {"CreationDate": None, "Producer": None},
    ".svg": {"Date": None},
    ".png": {"Software": None},
}


def build_figure(job: PlotJob):
    """Validate inputs and return the drawn matplotlib Figure."""
    return _BUILDERS[job.figure_id](job)


def render(job: PlotJob) -> Path:
    """Build the figure and write it to job.output_path; returns the path."""
    figure = build_figure(job)
    job.output_path.parent.mkdir(parents=True, exist_ok=True)
    try:
        suffix = job.output_path.suffix.lower()
        figure.savefig(
            job.output_path,
            dpi=150,
            metadata=_DETERMINISTIC_METADATA.get(suffix),
        )
    finally:
        plt.close(figure)
    return job.output_path
