"""Experiment runner: initial conditions, the time loop, and file output.

A run takes a :class:`SimConfig`, marches the stepper, and leaves three
kinds of artifact in the output directory:

* ``diagnostics.csv`` -- one row of scalar diagnostics per recorded step,
  full double precision, columns fixed by :data:`DIAGNOSTIC_COLUMNS`;
* field snapshots -- ``<name>_<step>.bin`` holding raw little-endian
  float64 samples in row-major order, each with a ``<name>_<step>.json``
  sidecar describing grid, time and byte order;
* ``run_summary.json`` -- final scalars, relaxation-case counts and wall
  time, written also when the run stops early on divergence so partial
  output stays usable.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .errors import ConfigError, DivergenceError, SnapshotFormatError
from .manufactured import ManufacturedCase, exact_phi, exact_u, forcing_fields
from .model import ModelParams, crystal_area
from .spectral import Grid, RealField
from .stepping import Stepper

__all__ = [
    "DIAGNOSTIC_COLUMNS",
    "SNAPSHOT_VERSION",
    "InitialCondition",
    "SimConfig",
    "RunResult",
    "init_single_nucleus",
    "init_three_nuclei",
    "init_nucleus_3d",
    "initial_state",
    "run",
    "write_snapshot",
    "read_snapshot",
    "rotation_error",
]

DIAGNOSTIC_COLUMNS = (
    "step", "t", "E", "E1", "q", "qbar", "xi", "eta",
    "zeta", "zeta_case", "H", "area",
)

SNAPSHOT_VERSION = 1

INITIAL_KINDS = ("single_nucleus", "three_nuclei", "nucleus_3d", "manufactured")


# -- initial conditions ----------------------------------------------------


def _distance(grid: Grid, center) -> np.ndarray:
    coords = grid.coords()
    if len(center) != grid.dim:
        raise ConfigError(
            f"center needs {grid.dim} coordinates, got {len(center)}",
            key="initial.center",
        )
    acc = sum((c - float(x0)) ** 2 for c, x0 in zip(coords, center))
    return np.sqrt(np.broadcast_to(acc, grid.shape))


def _fill_u(grid: Grid, phi0: np.ndarray, u_cold: float, u_fill: str) -> np.ndarray:
    if u_fill == "uniform":
        return np.full(grid.shape, float(u_cold))
    if u_fill == "sign":
        return np.where(phi0 > 0.0, 0.0, float(u_cold))
    raise ConfigError(
        f"u_fill must be 'sign' or 'uniform', got {u_fill!r}", key="initial.u_fill"
    )


def init_single_nucleus(grid, center, radius, width, u_cold, u_fill="sign"):
    """Seed crystal: phi0 = tanh((radius - |x - center|)/width).

    The undercooling is either uniform (``u_fill='uniform'``) or zero in
    the solid and ``u_cold`` in the melt (``'sign'``).
    """
    if grid.dim != 2:
        raise ConfigError("single_nucleus is a 2-D initial condition",
                          key="initial.kind")
    phi0 = np.tanh((radius - _distance(grid, center)) / width)
    u0 = _fill_u(grid, phi0, u_cold, u_fill)
    return RealField(grid, phi0), RealField(grid, u0)


def init_three_nuclei(grid, centers, radius, width, u_cold, u_fill="sign"):
    """Three seed crystals: summed tanh profiles shifted back to [-1, 1].

    Away from all nuclei each tanh contributes -1; the +2 offset returns
    the far field to -1 while each nucleus center still reaches phi > 0.
    """
    if grid.dim != 2:
        raise ConfigError("three_nuclei is a 2-D initial condition",
                          key="initial.kind")
    if len(centers) != 3:
        raise ConfigError(
            f"three_nuclei needs exactly 3 centers, got {len(centers)}",
            key="initial.centers",
        )
    phi0 = np.zeros(grid.shape)
    for center in centers:
        phi0 += np.tanh((radius - _distance(grid, center)) / width)
    phi0 += 2.0
    u0 = _fill_u(grid, phi0, u_cold, u_fill)
    return RealField(grid, phi0), RealField(grid, u0)


def init_nucleus_3d(grid, center, radius, width, u_cold, u_fill="sign"):
    """Spherical seed crystal, the 3-D analogue of the single nucleus."""
    if grid.dim != 3:
        raise ConfigError("nucleus_3d needs a 3-D grid", key="initial.kind")
    phi0 = np.tanh((radius - _distance(grid, center)) / width)
    u0 = _fill_u(grid, phi0, u_cold, u_fill)
    return RealField(grid, phi0), RealField(grid, u0)


@dataclass(frozen=True)
class InitialCondition:
    """Which starting state to build, with its geometry parameters."""

    kind: str
    centers: tuple = ()
    radius: float = 0.0
    width: float = 0.0
    u_cold: float = -0.55
    u_fill: str = "sign"

    def __post_init__(self):
        if self.kind not in INITIAL_KINDS:
            raise ConfigError(
                f"initial kind must be one of {INITIAL_KINDS}, got {self.kind!r}",
                key="initial.kind",
            )
        if self.kind != "manufactured":
            if not self.radius > 0:
                raise ConfigError("nucleus radius must be positive",
                                  key="initial.radius")
            if not self.width > 0:
                raise ConfigError("interface width must be positive",
                                  key="initial.width")
        if self.u_fill not in ("sign", "uniform"):
            raise ConfigError(
                f"u_fill must be 'sign' or 'uniform', got {self.u_fill!r}",
                key="initial.u_fill",
            )

    def dim(self) -> int:
        return 3 if self.kind == "nucleus_3d" else 2


@dataclass(frozen=True)
class SimConfig:
    """Everything a run needs; validated on construction."""

    grid: Grid
    params: ModelParams
    dt: float
    n_steps: int
    initial: InitialCondition
    out_dir: Path
    order: int = 1
    dealias: bool = False
    snapshot_every: int = 100
    diagnostics_every: int = 1
    seed: int = 0  # reserved for stochastic variants; packaged presets ignore it

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigError("dt must be positive", key="time.dt")
        if self.n_steps < 1:
            raise ConfigError("n_steps must be at least 1", key="time.n_steps")
        if self.order not in (1, 2, 3):
            raise ConfigError("order must be 1, 2 or 3", key="scheme.order")
        if self.snapshot_every < 0:
            raise ConfigError("snapshot_every must be >= 0 (0 disables)",
                              key="output.snapshot_every")
        if self.diagnostics_every < 1:
            raise ConfigError("diagnostics_every must be >= 1",
                              key="output.diagnostics_every")
        if self.grid.dim != self.initial.dim():
            raise ConfigError(
                f"initial condition '{self.initial.kind}' needs a "
                f"{self.initial.dim()}-D grid, the grid is {self.grid.dim}-D",
                key="initial.kind",
            )
        object.__setattr__(self, "out_dir", Path(self.out_dir))


def initial_state(config: SimConfig):
    """Build (phi0, u0, forcing) for a config; forcing is usually None."""
    ic = config.initial
    grid = config.grid
    if ic.kind == "manufactured":
        case = ManufacturedCase("configured", grid, config.params)
        return (
            exact_phi(grid, 0.0),
            exact_u(grid, 0.0),
            lambda t: forcing_fields(case, t),
        )
    if ic.kind == "single_nucleus":
        phi0, u0 = init_single_nucleus(
            grid, ic.centers[0], ic.radius, ic.width, ic.u_cold, ic.u_fill
        )
    elif ic.kind == "three_nuclei":
        phi0, u0 = init_three_nuclei(
            grid, ic.centers, ic.radius, ic.width, ic.u_cold, ic.u_fill
        )
    else:
        phi0, u0 = init_nucleus_3d(
            grid, ic.centers[0], ic.radius, ic.width, ic.u_cold, ic.u_fill
        )
    return phi0, u0, None


# -- snapshot files ---------------------------------------------------------

_SIDE_CAR_KEYS = ("dim", "shape", "lengths", "time", "field", "endianness", "version")


def _snapshot_paths(path):
    base = Path(path)
    if base.suffix in (".bin", ".json"):
        base = base.with_suffix("")
    return base.with_suffix(".bin"), base.with_suffix(".json")


def write_snapshot(field: RealField, path, *, time: float, name: str):
    """Write raw samples plus a json sidecar; returns (bin_path, json_path)."""
    bin_path, json_path = _snapshot_paths(path)
    field.values.astype("<f8").tofile(bin_path)
    meta = {
        "dim": field.grid.dim,
        "shape": list(field.grid.shape),
        "lengths": list(field.grid.lengths),
        "time": float(time),
        "field": name,
        "endianness": "little",
        "version": SNAPSHOT_VERSION,
    }
    json_path.write_text(json.dumps(meta, indent=1) + "\n")
    return bin_path, json_path


def read_snapshot(path):
    """Read a snapshot written by :func:`write_snapshot`.

    Returns ``(field, metadata)``. Malformed headers raise
    :class:`SnapshotFormatError` naming the offending key.
    """
    bin_path, json_path = _snapshot_paths(path)
    try:
        meta = json.loads(json_path.read_text())
    except json.JSONDecodeError as exc:
        raise SnapshotFormatError(f"sidecar {json_path} is not valid json: {exc}")
    if not isinstance(meta, dict):
        raise SnapshotFormatError(f"sidecar {json_path} must hold an object")
    for key in _SIDE_CAR_KEYS:
        if key not in meta:
            raise SnapshotFormatError(f"snapshot header is missing key '{key}'")
    if meta["version"] != SNAPSHOT_VERSION:
        raise SnapshotFormatError(
            f"unsupported value in key 'version': {meta['version']!r}"
        )
    if meta["endianness"] != "little":
        raise SnapshotFormatError(
            f"unsupported value in key 'endianness': {meta['endianness']!r}"
        )
    shape = meta["shape"]
    if (
        not isinstance(shape, list)
        or not shape
        or not all(isinstance(n, int) for n in shape)
    ):
        raise SnapshotFormatError("key 'shape' must be a list of integers")
    if meta["dim"] != len(shape):
        raise SnapshotFormatError(
            f"key 'dim' is {meta['dim']} but 'shape' has {len(shape)} entries"
        )
    lengths = meta["lengths"]
    if not isinstance(lengths, list) or len(lengths) != len(shape):
        raise SnapshotFormatError("key 'lengths' must match 'shape' in length")
    try:
        grid = Grid(tuple(shape), tuple(float(x) for x in lengths))
    except (TypeError, ValueError) as exc:
        raise SnapshotFormatError(f"key 'shape'/'lengths' invalid: {exc}")
    values = np.fromfile(bin_path, dtype="<f8")
    if values.size != grid.npoints:
        raise SnapshotFormatError(
            f"data file holds {values.size} samples, key 'shape' promises "
            f"{grid.npoints}"
        )
    return RealField(grid, values.reshape(grid.shape)), meta


# -- symmetry ----------------------------------------------------------------


def rotation_error(values: np.ndarray, axes=(0, 1)) -> float:
    """Max deviation from 90-degree rotational symmetry about the box center.

    The rotation maps grid index i to (N - i) mod N, which is the discrete
    quarter turn about the midpoint pi of the periodic box (not about the
    array center, which sits half a cell off).
    """
    a0, a1 = axes
    n = values.shape[a0]
    if values.shape[a1] != n:
        raise ValueError("rotation axes must have equal extents")
    swapped = np.swapaxes(values, a0, a1)
    rot = np.roll(np.flip(swapped, axis=a0), 1, axis=a0)
    return float(np.max(np.abs(values - rot)))


# -- the run loop -------------------------------------------------------------


@dataclass(frozen=True)
class RunResult:
    status: str
    steps_completed: int
    final_time: float
    final_energy: float
    final_q: float
    final_area: float
    zeta_case_counts: tuple
    wall_seconds: float
    out_dir: Path
    divergence_step: int = -1  # -1 when the run completed
    detail: str = ""


def _json_value(x):
    """Strict-JSON stand-in: non-finite floats have no literal, use null."""
    if isinstance(x, float) and not np.isfinite(x):
        return None
    return x


def _format_row(report) -> str:
    parts = [str(report.step)]
    for value in (
        report.t, report.energy, report.energy_main, report.q, report.qbar,
        report.xi, report.eta, report.zeta,
    ):
        parts.append(f"{value:.17g}")
    parts.append(str(report.zeta_case))
    parts.append(f"{report.dissipation:.17g}")
    parts.append(f"{report.area:.17g}")
    return ",".join(parts)


def run(config: SimConfig) -> RunResult:
    """Execute a configured run, writing all artifacts under its out_dir.

    Divergence does not raise: the partial diagnostics and a summary with
    ``status='diverged'`` are kept, and the result carries the failing
    step index.
    """
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    phi0, u0, forcing = initial_state(config)
    stepper = Stepper(
        config.grid, config.params, config.dt, config.order,
        forcing=forcing, dealias=config.dealias,
    )
    stepper.start(phi0, u0)

    def snapshot(step):
        write_snapshot(stepper.phi, out / f"phi_{step}", time=stepper.time,
                       name="phi")
        write_snapshot(stepper.u, out / f"u_{step}", time=stepper.time, name="u")

    started = time.perf_counter()
    status, div_step, detail = "completed", -1, ""
    last = stepper.initial_report()
    with open(out / "diagnostics.csv", "w", newline="\n") as sink:
        sink.write(",".join(DIAGNOSTIC_COLUMNS) + "\n")
        sink.write(_format_row(last) + "\n")
        if config.snapshot_every:
            snapshot(0)
        try:
            for step in range(1, config.n_steps + 1):
                report = stepper.advance()
                last = report
                if step % config.diagnostics_every == 0 or step == config.n_steps:
                    sink.write(_format_row(report) + "\n")
                if config.snapshot_every and (
                    step % config.snapshot_every == 0 or step == config.n_steps
                ):
                    snapshot(step)
        except DivergenceError as exc:
            status, div_step, detail = "diverged", exc.step, str(exc)

    wall = time.perf_counter() - started
    result = RunResult(
        status=status,
        steps_completed=stepper.step_index,
        final_time=stepper.time,
        final_energy=last.energy,
        final_q=stepper.q,
        final_area=crystal_area(stepper.phi),
        zeta_case_counts=tuple(stepper.zeta_case_counts),
        wall_seconds=wall,
        out_dir=out,
        divergence_step=div_step,
        detail=detail,
    )
    summary = {
        "status": result.status,
        "steps_completed": result.steps_completed,
        "final_time": result.final_time,
        "final_energy": _json_value(result.final_energy),
        "final_q": _json_value(result.final_q),
        "final_area": _json_value(result.final_area),
        "zeta_cases": {
            "case1": result.zeta_case_counts[0],
            "case2": result.zeta_case_counts[1],
            "case3": result.zeta_case_counts[2],
        },
        "linear_solves": stepper.linear_solves,
        "wall_seconds": result.wall_seconds,
        "kernel_backend": kernels.BACKEND,
        "version": __version__,
    }
    if status == "diverged":
        summary["divergence_step"] = div_step
        summary["detail"] = detail
    (out / "run_summary.json").write_text(json.dumps(summary, indent=1) + "\n")
    return result
