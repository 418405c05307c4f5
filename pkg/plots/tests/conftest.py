"""Handcrafted miniature run directories matching the simulator's file formats."""

import math

import numpy as np
import pytest


def write_density_map(path, times, sites, values, col="site"):
    with open(path, "w") as fh:
        fh.write(f"t,{col},density\n")
        for t, row in zip(times, values):
            for c, v in zip(sites, row):
                fh.write(f"{t:g},{c:g},{v:.6e}\n")


def write_trajectory(path, t, x, v, a):
    with open(path, "w") as fh:
        fh.write("t,position,velocity,acceleration\n")
        for row in zip(t, x, v, a):
            fh.write(",".join(f"{u:.9e}" for u in row) + "\n")


def write_meta(path, **kv):
    with open(path, "w") as fh:
        for key, value in kv.items():
            fh.write(f"{key} = {value}\n")


def worldline(alpha, c, t):
    s = np.sqrt(1.0 + (alpha * t / c) ** 2)
    return (c * c / alpha) * (s - 1.0), alpha * t / s, alpha / s**3


@pytest.fixture
def airy_run(tmp_path):
    """Small airy-style run directory: density map + trajectory + meta."""
    run = tmp_path / "airy"
    run.mkdir()
    times = np.arange(0.0, 21.0, 1.0)
    sites = np.arange(-60, 21)
    x = sites[None, :] * 0.2
    center = -1.019 + 0.008 * times[:, None] ** 2
    dens = np.exp(-((x - center) ** 2) / 0.5) * (1.0 + 0.3 * np.cos(4.0 * x))
    dens = np.clip(dens, 1e-12, None)
    write_density_map(run / "density.csv", times, sites, dens)
    xx, vv, aa = worldline(0.016, 1.9, times)
    write_trajectory(run / "trajectory.csv", times, xx - 5.0, vv, aa)
    write_meta(run / "meta.txt", scenario="airy-free", dx=0.2, j_min=-60, j_max=20)
    return run


@pytest.fixture
def fit_run(tmp_path):
    run = tmp_path / "fit"
    run.mkdir()
    t = np.arange(0.0, 300.5, 0.5)
    alpha, c = 0.0153, 1.9
    x, v, a = worldline(alpha, c, t)
    write_trajectory(run / "trajectory.csv", t, x, v, a)
    (run / "fit.txt").write_text(
        f"alpha = {alpha}\nc = {c}\nrms_residual = 0.001\nmethod = refined\n"
        "n_points = 601\nt_range = 0 300\n"
    )
    write_meta(run / "meta.txt", scenario="airy-fit", dx=0.2)
    return run


@pytest.fixture
def bloch_run(tmp_path):
    run = tmp_path / "bloch"
    run.mkdir()
    times = np.arange(0.0, 101.0, 2.0)
    sites = np.arange(-40, 81)
    v0 = 2 * math.pi / 100.0
    center = 2.0 / v0 * (1.0 - np.cos(v0 * times))[:, None]
    dens = np.exp(-((sites[None, :] - center) ** 2) / 50.0)
    write_density_map(run / "density.csv", times, sites, dens)
    momenta = -math.pi + 2 * math.pi * np.arange(64) / 64
    kc = ((v0 * times + math.pi) % (2 * math.pi) - math.pi)[:, None]
    dens_k = np.exp(-((momenta[None, :] - kc) ** 2) / 0.02)
    write_density_map(run / "momentum.csv", times, momenta, dens_k, col="k")
    write_meta(run / "meta.txt", scenario="bloch", dx=0.2, v0=v0)
    return run


@pytest.fixture
def driven_run(tmp_path):
    def make(name, k_mid):
        run = tmp_path / name
        run.mkdir()
        times = np.arange(0.0, 91.0, 1.0)
        sites = np.arange(-30, 151)
        speed = np.where((times >= 30) & (times < 60), 0.8, 1.85)
        center = -5.0 + np.cumsum(speed) - speed[0]
        dens = np.exp(-((sites[None, :] - center[:, None]) ** 2) / 8.0)
        write_density_map(run / "density.csv", times, sites, dens)
        write_meta(
            run / "meta.txt",
            scenario="driven",
            dx=0.2,
            omega=2 * math.pi,
            schedule=f"0:0.5,30:{k_mid},60:0.5",
            kick_phi=1.45,
        )
        return run

    return make


@pytest.fixture
def summary_run(tmp_path):
    run = tmp_path / "summary"
    run.mkdir()
    t = np.arange(0.0, 301.0, 1.0)
    _, v_rel, _ = worldline(0.0153, 1.9, t)
    with open(run / "summary.csv", "w") as fh:
        fh.write("t,v_continuum,v_relativistic,v_bloch,v_measured\n")
        for i, ti in enumerate(t):
            fh.write(
                f"{ti:g},{0.0153 * ti:.6e},{v_rel[i]:.6e},"
                f"{2.0 * math.sin(0.0062832 * ti):.6e},{v_rel[i] * 1.01:.6e}\n"
            )
    write_meta(run / "meta.txt", scenario="summary", dx=0.2)
    return run
