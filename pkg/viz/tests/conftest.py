"""Shared fixtures: synthesized solver artifacts in the documented formats.

Everything here writes files byte-for-byte the way the solver does, so
the plotting code can be exercised without the solver installed.
"""

import csv
import json

import numpy as np
import pytest

SIDECAR_KEYS = ("dim", "shape", "lengths", "time", "field", "endianness",
                "version")


def write_snapshot(directory, values, *, field="phi", step=0,
                   lengths=None, time=0.0, drop=(), **overrides):
    """Write a snapshot pair (raw float64 + json sidecar); returns base path.

    ``overrides`` patch sidecar entries and ``drop`` removes them, for
    tests that need a deliberately malformed header.
    """
    values = np.asarray(values, dtype=float)
    if lengths is None:
        lengths = [2.0 * np.pi] * values.ndim
    base = directory / f"{field}_{step}"
    values.astype("<f8").tofile(base.with_suffix(".bin"))
    meta = {
        "dim": values.ndim,
        "shape": list(values.shape),
        "lengths": list(lengths),
        "time": float(time),
        "field": field,
        "endianness": "little",
        "version": 1,
    }
    meta.update(overrides)
    for key in drop:
        meta.pop(key, None)
    base.with_suffix(".json").write_text(json.dumps(meta))
    return base


def write_csv(path, columns, rows):
    with open(path, "w", newline="") as sink:
        writer = csv.writer(sink)
        writer.writerow(columns)
        writer.writerows(rows)
    return path


def tanh_disc(n=48, radius=1.5, width=0.25, length=2.0 * np.pi):
    """A smooth disc of +1 inside radius, -1 outside; crosses zero."""
    x = np.arange(n) * (length / n)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    r = np.hypot(xx - length / 2.0, yy - length / 2.0)
    return np.tanh((radius - r) / width)


def tanh_ball(n=24, radius=1.2, width=0.3, length=2.0 * np.pi):
    x = np.arange(n) * (length / n)
    xx, yy, zz = np.meshgrid(x, x, x, indexing="ij")
    r = np.sqrt((xx - length / 2.0) ** 2 + (yy - length / 2.0) ** 2
                + (zz - length / 2.0) ** 2)
    return np.tanh((radius - r) / width)


@pytest.fixture
def snapshot_dir(tmp_path):
    return tmp_path


@pytest.fixture
def diagnostics_csv(tmp_path):
    """A small diagnostics table with the solver's full header."""
    columns = ("step", "t", "E", "E1", "q", "qbar", "xi", "eta", "zeta",
               "zeta_case", "H", "area")
    rows = []
    for step in range(6):
        t = 0.1 * step
        energy = 5.0 - 0.5 * step
        rows.append((step, t, energy, energy - 1.0, energy, energy + 0.01,
                     1.0, 1.0, 1.0, 1, 0.2, 0.3 + 0.05 * step))
    return write_csv(tmp_path / "diagnostics.csv", columns, rows)
