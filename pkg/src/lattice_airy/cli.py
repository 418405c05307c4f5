"""Command-line front end.

Subcommands run one scenario each and write the artifact files into --out:

    lattice-airy airy   --dx 0.2 --tmax 300 --out runs/airy
    lattice-airy fit    --dx 0.2 --tmax 300 --out runs/fit
    lattice-airy sweep  --dx-list 0.2,0.15,0.1,0.05 --out runs/sweep
    lattice-airy bloch  --v0 0.0062832 --width 10 --out runs/bloch
    lattice-airy driven --schedule 0:0.5,30:1.691,60:0.5 --phi 1.45 --out runs/driven
    lattice-airy summary --out runs/summary

Exit codes: 0 success, 2 configuration error, 3 runtime abort (boundary
breach or tracking lost), 4 fit downgraded to the parabola fallback
(outputs are still written).
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings

from .errors import (
    BoundaryBreachError,
    ConfigurationError,
    DomainError,
    TrackingLostError,
)
from .harness import SWEEP_DX_LIST, default_config, run_scenario, sweep_scaling
from .propagators import DriveSchedule, TiltSpec, default_drive_dt
from .states import ApertureSpec

_SCENARIO_OF = {
    "airy": "airy-free",
    "fit": "airy-fit",
    "bloch": "bloch",
    "driven": "driven",
    "summary": "summary",
}


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        j_min, j_max = text.split(":")
        return int(j_min), int(j_max)
    except ValueError as exc:
        raise ConfigurationError(f"--grid expects jmin:jmax, got {text!r}") from exc


def _parse_aperture(text: str) -> ApertureSpec:
    if text == "hard":
        return ApertureSpec("hard")
    if text.startswith("exp:"):
        try:
            return ApertureSpec("exponential", float(text[4:]))
        except ValueError as exc:
            raise ConfigurationError(f"bad aperture gamma in {text!r}") from exc
    raise ConfigurationError(f"--aperture expects 'hard' or 'exp:GAMMA', got {text!r}")


def _parse_schedule(text: str, omega: float) -> DriveSchedule:
    try:
        segments = tuple(
            (float(t), float(k))
            for t, k in (piece.split(":") for piece in text.split(","))
        )
    except ValueError as exc:
        raise ConfigurationError(
            f"--schedule expects t0:K0,t1:K1,..., got {text!r}"
        ) from exc
    return DriveSchedule(omega, segments)


def _parse_dx_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v]
    except ValueError as exc:
        raise ConfigurationError(f"bad --dx-list {text!r}") from exc


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dx", type=float, default=None, help="lattice spacing")
    p.add_argument("--tmax", type=float, default=None, help="final time (1/J)")
    p.add_argument("--dt", type=float, default=None, help="quadrature step (1/J)")
    p.add_argument("--grid", type=str, default=None, help="jmin:jmax site range")
    p.add_argument(
        "--aperture", type=str, default=None, help="'hard' or 'exp:GAMMA'"
    )
    p.add_argument(
        "--snapshot-interval", type=float, default=None, help="trajectory cadence"
    )
    p.add_argument("--out", type=str, required=True, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lattice-airy",
        description="Airy wavepacket dynamics on a tight-binding lattice",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("airy", "free Airy wavepacket run (density map + trajectory)"),
        ("fit", "free Airy run plus the relativistic two-parameter fit"),
        ("summary", "velocity curves of the three forms of motion"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)

    p = sub.add_parser("sweep", help="lattice-spacing sweep and scaling regression")
    p.add_argument(
        "--dx-list",
        type=str,
        default=",".join(str(v) for v in SWEEP_DX_LIST),
        help="comma-separated spacings",
    )
    p.add_argument("--out", type=str, required=True)

    p = sub.add_parser("bloch", help="tilted-lattice Bloch oscillation")
    _add_common(p)
    p.add_argument("--v0", type=float, default=None, help="tilt per site (units J)")
    p.add_argument(
        "--width", type=float, default=None, help="Gaussian width (x units)"
    )

    p = sub.add_parser("driven", help="piecewise sinusoidally driven lattice")
    _add_common(p)
    p.add_argument("--omega", type=float, default=2.0 * math.pi)
    p.add_argument(
        "--schedule", type=str, default=None, help="t0:K0,t1:K1,... segment list"
    )
    p.add_argument("--phi", type=float, default=None, help="phase-imprint kick")

    return parser


def _config_from_args(args: argparse.Namespace):
    cfg = default_config(_SCENARIO_OF[args.command])
    if args.dx is not None:
        cfg.dx = args.dx
    if args.tmax is not None:
        cfg.t_max = args.tmax
    if args.grid is not None:
        cfg.grid = _parse_grid(args.grid)
    if args.aperture is not None:
        cfg.aperture = _parse_aperture(args.aperture)
    if args.snapshot_interval is not None:
        cfg.snapshot_interval = args.snapshot_interval
    if args.command == "bloch":
        if args.v0 is not None:
            cfg.tilt = TiltSpec(args.v0)
        if args.width is not None:
            cfg.gaussian_width = args.width
    if args.command == "driven":
        omega = args.omega
        if args.schedule is not None:
            cfg.drive = _parse_schedule(args.schedule, omega)
        elif omega != cfg.drive.omega:
            cfg.drive = DriveSchedule(omega, cfg.drive.segments)
        if args.phi is not None:
            cfg.kick_phi = args.phi
        cfg.dt = default_drive_dt(cfg.drive.omega)
    if args.dt is not None:
        cfg.dt = args.dt
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            result = sweep_scaling(_parse_dx_list(args.dx_list), args.out)
            for row in result["rows"]:
                if "error" in row:
                    print(f"dx={row['dx']:g}: {row['error']}", file=sys.stderr)
                else:
                    c_txt = (
                        f"{row['c']:.4g}" if math.isfinite(row["c"]) else "--"
                    )
                    print(
                        f"dx={row['dx']:g}: c={c_txt} alpha={row['alpha']:.4g} "
                        f"({row['method']})"
                    )
            if result["scaling"] is not None:
                exponent, prefactor = result["scaling"]
                print(f"scaling: alpha = {prefactor:.4g} * dx^{exponent:.4g}")
            if any("error" in row for row in result["rows"]):
                return 3
            return 0

        cfg = _config_from_args(args)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            artifact = run_scenario(cfg, args.out)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        if artifact.fit is not None:
            c_txt = (
                f"{artifact.fit.c:.4g}" if math.isfinite(artifact.fit.c) else "--"
            )
            print(
                f"fit: alpha={artifact.fit.alpha:.4g} c={c_txt} "
                f"rms={artifact.fit.rms_residual:.3g} ({artifact.fit.method})"
            )
            if artifact.fit.method == "parabola-fallback":
                return 4
        print(f"wrote {args.out}")
        return 0
    except (ConfigurationError, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (BoundaryBreachError, TrackingLostError) as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
