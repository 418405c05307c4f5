"""Readers for the simulator's delimited-text artifacts.

Every reader validates the file's presence, header, and non-emptiness before
any rendering starts, and reports exactly which column or file is at fault.
"""

from __future__ import annotations

import math
import warnings
from pathlib import Path

import numpy as np


class InputError(ValueError):
    """Missing file, missing column, or empty table."""


def read_table(path, required: list[str]) -> dict[str, np.ndarray]:
    """Read a one-header-line CSV into named columns; empty cells become NaN."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"input file {path} does not exist")
    with open(path) as fh:
        header = fh.readline().strip()
    names = header.split(",")
    for col in required:
        if col not in names:
            raise InputError(f"{path}: missing column {col!r}")
    with warnings.catch_warnings():
        # a file with only a header is reported as InputError below
        warnings.simplefilter("ignore", UserWarning)
        data = np.genfromtxt(path, delimiter=",", skip_header=1, filling_values=np.nan)
    data = np.atleast_2d(data)
    if data.size == 0 or data.shape[0] == 0:
        raise InputError(f"{path}: table is empty")
    if data.shape[1] != len(names):
        raise InputError(f"{path}: row width does not match header {names}")
    return {name: data[:, i] for i, name in enumerate(names)}


def read_map(path, col: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Read a (t, col, density) long table into (times, columns, matrix)."""
    table = read_table(path, ["t", col, "density"])
    times = np.unique(table["t"])
    cols = np.unique(table[col])
    values = table["density"].reshape(times.size, cols.size)
    return times, cols, values


def read_fit(path) -> dict:
    """Parse the fit report's `key = value` lines; a '--' light speed is NaN."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"input file {path} does not exist")
    out: dict = {}
    for line in path.read_text().splitlines():
        if "=" not in line:
            continue
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key in ("alpha", "c", "rms_residual"):
            out[key] = math.nan if value == "--" else float(value)
        elif key:
            out[key] = value
    for key in ("alpha", "c", "method"):
        if key not in out:
            raise InputError(f"{path}: missing fit field {key!r}")
    return out
