"""Readers for the solver's output files.

This package talks to the solver only through its documented artifacts:

* ``diagnostics.csv`` -- per-step scalar columns;
* ``<name>_<step>.bin`` + ``<name>_<step>.json`` -- raw little-endian
  float64 field samples with a json sidecar;
* ``run_summary.json`` / ``stability_summary.json`` -- final scalars;
* ``convergence_k<order>.csv`` -- step-size sweep errors.

Every reader validates what it consumes (the sidecar's ``version`` key
in particular) and none of them ever writes to an input file.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

__all__ = [
    "DIAGNOSTIC_COLUMNS",
    "SNAPSHOT_VERSION",
    "FormatError",
    "read_snapshot",
    "read_diagnostics",
    "read_convergence",
    "read_summary",
    "snapshot_series",
]

# The solver's documented diagnostics header, in order.
DIAGNOSTIC_COLUMNS = (
    "step", "t", "E", "E1", "q", "qbar", "xi", "eta",
    "zeta", "zeta_case", "H", "area",
)

SNAPSHOT_VERSION = 1

_SIDE_CAR_KEYS = ("dim", "shape", "lengths", "time", "field", "endianness",
                  "version")


class FormatError(ValueError):
    """An input file does not match the solver's documented format."""


def _snapshot_paths(path):
    base = Path(path)
    if base.suffix in (".bin", ".json"):
        base = base.with_suffix("")
    return base.with_suffix(".bin"), base.with_suffix(".json")


def read_snapshot(path):
    """Load one field snapshot; returns ``(values, metadata)``.

    ``values`` is a float64 array shaped per the sidecar; ``metadata``
    is the sidecar dict. Malformed sidecars raise :class:`FormatError`
    naming the offending key.
    """
    bin_path, json_path = _snapshot_paths(path)
    if not json_path.exists():
        raise FormatError(f"snapshot sidecar {json_path} is missing")
    try:
        meta = json.loads(json_path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"sidecar {json_path} is not valid json: {exc}")
    for key in _SIDE_CAR_KEYS:
        if key not in meta:
            raise FormatError(f"snapshot header is missing key '{key}'")
    if meta["version"] != SNAPSHOT_VERSION:
        raise FormatError(f"unsupported snapshot version {meta['version']!r}")
    if meta["endianness"] != "little":
        raise FormatError(f"unsupported endianness {meta['endianness']!r}")
    shape = meta["shape"]
    if not isinstance(shape, list) or len(shape) != meta["dim"]:
        raise FormatError("keys 'shape' and 'dim' are inconsistent")
    values = np.fromfile(bin_path, dtype="<f8")
    expected = int(np.prod(shape))
    if values.size != expected:
        raise FormatError(
            f"{bin_path} holds {values.size} samples, sidecar promises "
            f"{expected}"
        )
    return values.reshape(shape), meta


def snapshot_series(directory, field="phi"):
    """All snapshots of one field in a run directory, sorted by step."""
    directory = Path(directory)
    found = []
    for json_path in directory.glob(f"{field}_*.json"):
        try:
            step = int(json_path.stem.rsplit("_", 1)[1])
        except ValueError:
            continue
        found.append((step, json_path.with_suffix("")))
    return [path for _, path in sorted(found)]


def _read_columns(path, columns):
    with open(path, newline="") as source:
        reader = csv.DictReader(source)
        header = reader.fieldnames or []
        wanted = tuple(columns) if columns is not None else tuple(header)
        for name in wanted:
            if name not in header:
                raise FormatError(
                    f"{path} has no column '{name}' "
                    f"(found: {', '.join(header)})"
                )
        rows = list(reader)
    return {
        name: np.array([float(row[name]) for row in rows]) for name in wanted
    }


def read_diagnostics(path, columns=None):
    """Read diagnostics columns into float arrays.

    ``path`` may be the csv file or a run directory. ``columns``
    defaults to everything present; asking for a column the file does
    not have raises :class:`FormatError` naming it.
    """
    path = Path(path)
    if path.is_dir():
        path = path / "diagnostics.csv"
    return _read_columns(path, columns)


def read_convergence(path):
    """Read a convergence table; returns dt/err_phi/err_u/diverged arrays."""
    return _read_columns(Path(path), ("dt", "err_phi", "err_u", "diverged"))


def read_summary(path):
    """Load a run or stability summary json."""
    path = Path(path)
    if path.is_dir():
        path = path / "run_summary.json"
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path} is not valid json: {exc}")
