"""Initial conditions, snapshot files and the run loop."""

import json

import numpy as np
import pytest

from dendrix.errors import ConfigError, SnapshotFormatError
from dendrix.model import ModelParams
from dendrix.simulation import (
    DIAGNOSTIC_COLUMNS,
    InitialCondition,
    RunResult,
    SimConfig,
    init_nucleus_3d,
    init_single_nucleus,
    init_three_nuclei,
    initial_state,
    read_snapshot,
    rotation_error,
    run,
    write_snapshot,
)
from dendrix.spectral import Grid, RealField

PI = np.pi


def nucleus_params(**overrides):
    base = dict(
        tau=100.0, eps=0.15, lam=1.0, latent_heat=1.0, diffusivity=0.225,
        sigma=0.05, folds=4, s1=4.0, s2=4.0, aniso_form="quartic",
    )
    base.update(overrides)
    return ModelParams(**base)


def tiny_config(tmp_path, **overrides):
    base = dict(
        grid=Grid((32, 32)),
        params=nucleus_params(),
        dt=0.05,
        n_steps=5,
        initial=InitialCondition(
            kind="single_nucleus", centers=((PI, PI),), radius=1.5, width=0.3
        ),
        out_dir=tmp_path / "out",
        order=2,
        snapshot_every=5,
    )
    base.update(overrides)
    return SimConfig(**base)


# -- initial conditions ------------------------------------------------------


def test_single_nucleus_profile():
    grid = Grid((64, 64))
    phi, u = init_single_nucleus(grid, (PI, PI), 1.5, 0.2, -0.55)
    center = phi.values[32, 32]
    corner = phi.values[0, 0]
    assert center == pytest.approx(np.tanh(1.5 / 0.2), abs=1e-12)
    assert corner < -0.999
    assert u.values[32, 32] == 0.0
    assert u.values[0, 0] == -0.55


def test_single_nucleus_uniform_fill():
    grid = Grid((32, 32))
    _, u = init_single_nucleus(grid, (PI, PI), 1.5, 0.2, -0.55, u_fill="uniform")
    assert np.all(u.values == -0.55)


def test_single_nucleus_rejects_3d_grid():
    with pytest.raises(ConfigError):
        init_single_nucleus(Grid((8, 8, 8)), (PI, PI, PI), 1.0, 0.1, -0.5)


def test_single_nucleus_center_length_checked():
    with pytest.raises(ConfigError, match="center"):
        init_single_nucleus(Grid((16, 16)), (PI,), 1.0, 0.1, -0.5)


def test_three_nuclei_profile():
    grid = Grid((128, 128))
    centers = ((PI / 2, PI / 2), (3 * PI / 2, PI / 2), (PI, 3 * PI / 2))
    phi, u = init_three_nuclei(grid, centers, 0.5, 0.1, -0.55)
    for cx, cy in centers:
        i, j = int(round(cx / (2 * PI) * 128)), int(round(cy / (2 * PI) * 128))
        assert phi.values[i, j] > 0.9
    assert phi.values[0, 0] == pytest.approx(-1.0, abs=1e-6)
    assert u.values[0, 0] == -0.55


def test_three_nuclei_requires_three_centers():
    grid = Grid((16, 16))
    with pytest.raises(ConfigError, match="3 centers"):
        init_three_nuclei(grid, ((PI, PI),), 0.5, 0.1, -0.55)


def test_nucleus_3d_profile():
    grid = Grid((16, 16, 16))
    phi, u = init_nucleus_3d(grid, (PI, PI, PI), 1.0, 0.2, -0.55)
    assert phi.values[8, 8, 8] == pytest.approx(np.tanh(1.0 / 0.2), abs=1e-12)
    assert phi.values[0, 0, 0] < -0.999
    assert u.values[8, 8, 8] == 0.0


def test_nucleus_3d_rejects_2d_grid():
    with pytest.raises(ConfigError):
        init_nucleus_3d(Grid((16, 16)), (PI, PI), 1.0, 0.2, -0.55)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(kind="blob"),
        dict(kind="single_nucleus", radius=0.0, width=0.1),
        dict(kind="single_nucleus", radius=1.0, width=-0.1),
        dict(kind="single_nucleus", radius=1.0, width=0.1, u_fill="mean"),
    ],
)
def test_initial_condition_rejects(kwargs):
    with pytest.raises(ConfigError):
        InitialCondition(**kwargs)


def test_manufactured_initial_state_carries_forcing(tmp_path):
    cfg = tiny_config(
        tmp_path,
        initial=InitialCondition(kind="manufactured"),
        params=nucleus_params(sigma=0.0, eps=1.0),
    )
    phi0, u0, forcing = initial_state(cfg)
    x, y = cfg.grid.coords()
    assert np.allclose(phi0.values, np.sin(x) * np.cos(y))
    assert forcing is not None
    f_phi, f_u = forcing(0.3)
    assert np.all(np.isfinite(f_phi.values))
    assert np.all(np.isfinite(f_u.values))


# -- config validation --------------------------------------------------------


@pytest.mark.parametrize(
    "overrides",
    [
        dict(dt=0.0),
        dict(n_steps=0),
        dict(order=4),
        dict(snapshot_every=-1),
        dict(diagnostics_every=0),
        dict(grid=Grid((8, 8, 8))),  # 2-D initial condition on a 3-D grid
    ],
)
def test_sim_config_rejects(tmp_path, overrides):
    with pytest.raises(ConfigError):
        tiny_config(tmp_path, **overrides)


# -- snapshots -----------------------------------------------------------------


def test_snapshot_round_trip(tmp_path):
    grid = Grid((16, 32), (2 * PI, 4 * PI))
    rng = np.random.default_rng(3)
    field = RealField(grid, rng.standard_normal(grid.shape))
    bin_path, json_path = write_snapshot(
        field, tmp_path / "phi_7", time=0.35, name="phi"
    )
    assert bin_path.name == "phi_7.bin"
    assert json_path.name == "phi_7.json"

    back, meta = read_snapshot(tmp_path / "phi_7")
    assert np.array_equal(back.values, field.values)
    assert back.grid.compatible(grid)
    assert meta["field"] == "phi"
    assert meta["time"] == 0.35
    assert meta["dim"] == 2
    assert meta["shape"] == [16, 32]
    assert meta["endianness"] == "little"
    assert meta["version"] == 1


def test_snapshot_read_accepts_either_suffix(tmp_path):
    grid = Grid((8, 8))
    field = RealField(grid, np.zeros(grid.shape))
    write_snapshot(field, tmp_path / "u_0", time=0.0, name="u")
    for suffix in (".bin", ".json"):
        back, _ = read_snapshot((tmp_path / "u_0").with_suffix(suffix))
        assert back.values.shape == (8, 8)


def _snapshot_with_patched_meta(tmp_path, patch):
    grid = Grid((8, 8))
    field = RealField(grid, np.ones(grid.shape))
    _, json_path = write_snapshot(field, tmp_path / "phi_0", time=0.0, name="phi")
    meta = json.loads(json_path.read_text())
    meta.update(patch)
    for key, value in patch.items():
        if value is None:
            del meta[key]
    json_path.write_text(json.dumps(meta))
    return tmp_path / "phi_0"


@pytest.mark.parametrize(
    "patch, needle",
    [
        ({"endianness": None}, "endianness"),
        ({"version": None}, "version"),
        ({"version": 2}, "version"),
        ({"endianness": "big"}, "endianness"),
        ({"shape": [8, "8"]}, "shape"),
        ({"dim": 3}, "dim"),
        ({"lengths": [6.28]}, "lengths"),
        ({"shape": [8, 16]}, "shape"),
    ],
)
def test_snapshot_malformed_header_names_key(tmp_path, patch, needle):
    base = _snapshot_with_patched_meta(tmp_path, patch)
    with pytest.raises(SnapshotFormatError, match=needle):
        read_snapshot(base)


def test_snapshot_rejects_broken_json(tmp_path):
    grid = Grid((8, 8))
    field = RealField(grid, np.ones(grid.shape))
    _, json_path = write_snapshot(field, tmp_path / "phi_0", time=0.0, name="phi")
    json_path.write_text("{not json")
    with pytest.raises(SnapshotFormatError, match="json"):
        read_snapshot(tmp_path / "phi_0")


def test_snapshot_truncated_data_detected(tmp_path):
    grid = Grid((8, 8))
    field = RealField(grid, np.ones(grid.shape))
    bin_path, _ = write_snapshot(field, tmp_path / "phi_0", time=0.0, name="phi")
    bin_path.write_bytes(bin_path.read_bytes()[:-8])
    with pytest.raises(SnapshotFormatError, match="63 samples"):
        read_snapshot(tmp_path / "phi_0")


# -- symmetry helper -----------------------------------------------------------


def test_rotation_error_zero_for_symmetric_field():
    grid = Grid((32, 32))
    x, y = grid.coords()
    values = np.cos(x) + np.cos(y) + np.cos(x) * np.cos(y)
    # cos evaluated at mirrored grid points differs by rounding only
    assert rotation_error(values) < 1e-14


def test_rotation_error_detects_asymmetry():
    grid = Grid((32, 32))
    x, y = grid.coords()
    assert rotation_error(np.cos(x) + 2 * np.cos(y)) == pytest.approx(2.0)


def test_rotation_error_measures_quarter_turn_about_midpoint():
    # A spike at (pi + a, pi) should land on (pi, pi + a) after the turn,
    # so a field equal to the sum of all four spike positions is exactly
    # invariant while a single spike is not.
    n = 64
    half, off = n // 2, 5
    spikes = np.zeros((n, n))
    for i, j in (
        (half + off, half),
        (half, half + off),
        (half - off, half),
        (half, half - off),
    ):
        spikes[i, j] = 1.0
    assert rotation_error(spikes) == 0.0

    single = np.zeros((n, n))
    single[half + off, half] = 1.0
    assert rotation_error(single) == 1.0


def test_rotation_error_3d_planes():
    grid = Grid((16, 16, 16))
    x, y, z = grid.coords()
    symmetric = np.cos(x) + np.cos(y) + np.cos(z)
    for axes in ((0, 1), (0, 2), (1, 2)):
        assert rotation_error(symmetric, axes=axes) < 1e-14
    lopsided = np.cos(x) + 2 * np.cos(y) + 3 * np.cos(z)
    assert rotation_error(lopsided, axes=(0, 1)) > 0.5


def test_rotation_error_exact_on_index_symmetric_field():
    # Distance-from-center in index space is invariant under the quarter
    # turn i -> (N - i) mod N, so the helper must return exactly zero.
    n = 32
    idx = np.minimum(np.arange(n), n - np.arange(n)).astype(float)
    values = idx[:, None] ** 2 + idx[None, :] ** 2
    assert rotation_error(values) == 0.0


def test_rotation_error_requires_square_axes():
    with pytest.raises(ValueError):
        rotation_error(np.zeros((8, 16)))


# -- the run loop ----------------------------------------------------------------


def test_run_writes_all_artifacts(tmp_path):
    cfg = tiny_config(tmp_path)
    result = run(cfg)
    assert isinstance(result, RunResult)
    assert result.status == "completed"
    assert result.steps_completed == 5
    assert result.final_time == pytest.approx(0.25)
    assert result.divergence_step == -1

    out = cfg.out_dir
    lines = (out / "diagnostics.csv").read_text().splitlines()
    assert lines[0] == ",".join(DIAGNOSTIC_COLUMNS)
    assert len(lines) == 7  # header, step 0, five steps
    first = lines[1].split(",")
    assert first[0] == "0"
    assert float(first[2]) > 1.0  # energy includes the +1 floor

    for name in ("phi_0", "u_0", "phi_5", "u_5"):
        assert (out / f"{name}.bin").exists()
        assert (out / f"{name}.json").exists()

    summary = json.loads((out / "run_summary.json").read_text())
    assert summary["status"] == "completed"
    assert summary["steps_completed"] == 5
    assert summary["linear_solves"] == 10
    assert sum(summary["zeta_cases"].values()) == 5
    assert summary["final_area"] > 0


def test_run_snapshot_cadence(tmp_path):
    cfg = tiny_config(tmp_path, n_steps=6, snapshot_every=4)
    run(cfg)
    steps = sorted(
        int(p.stem.split("_")[1]) for p in cfg.out_dir.glob("phi_*.bin")
    )
    assert steps == [0, 4, 6]  # cadence plus the forced final snapshot


def test_run_snapshots_disabled(tmp_path):
    cfg = tiny_config(tmp_path, snapshot_every=0)
    run(cfg)
    assert list(cfg.out_dir.glob("*.bin")) == []


def test_run_diagnostics_thinning(tmp_path):
    cfg = tiny_config(tmp_path, n_steps=6, diagnostics_every=3, snapshot_every=0)
    run(cfg)
    lines = (cfg.out_dir / "diagnostics.csv").read_text().splitlines()
    recorded = [int(line.split(",")[0]) for line in lines[1:]]
    assert recorded == [0, 3, 6]


def test_run_q_column_is_non_increasing(tmp_path):
    cfg = tiny_config(tmp_path, n_steps=12)
    run(cfg)
    lines = (cfg.out_dir / "diagnostics.csv").read_text().splitlines()[1:]
    q = [float(line.split(",")[4]) for line in lines]
    for a, b in zip(q, q[1:]):
        assert b <= a * (1 + 1e-12)


def test_run_is_deterministic(tmp_path):
    first = tiny_config(tmp_path, out_dir=tmp_path / "a")
    second = tiny_config(tmp_path, out_dir=tmp_path / "b")
    run(first)
    run(second)
    bytes_a = (tmp_path / "a" / "diagnostics.csv").read_bytes()
    bytes_b = (tmp_path / "b" / "diagnostics.csv").read_bytes()
    assert bytes_a == bytes_b


def test_run_survives_divergence(tmp_path):
    cfg = tiny_config(
        tmp_path,
        n_steps=5,
        initial=InitialCondition(
            kind="single_nucleus", centers=((PI, PI),), radius=1.5, width=0.3,
            u_cold=-1e160, u_fill="uniform",
        ),
    )
    result = run(cfg)
    assert result.status == "diverged"
    assert result.divergence_step == 1
    assert "step 1" in result.detail

    lines = (cfg.out_dir / "diagnostics.csv").read_text().splitlines()
    assert len(lines) == 2  # header plus the initial row only

    summary = json.loads((cfg.out_dir / "run_summary.json").read_text())
    assert summary["status"] == "diverged"
    assert summary["divergence_step"] == 1
    assert summary["final_energy"] is None  # overflowed, recorded as null


def test_run_forced_benchmark_tracks_exact_solution(tmp_path):
    from dendrix.manufactured import exact_phi

    params = nucleus_params(
        tau=10.0, eps=1.0, sigma=0.0, diffusivity=1.0, latent_heat=1.0
    )
    cfg = tiny_config(
        tmp_path,
        params=params,
        dt=0.01,
        n_steps=20,
        order=1,
        initial=InitialCondition(kind="manufactured"),
        snapshot_every=20,
    )
    result = run(cfg)
    assert result.status == "completed"
    assert result.final_time == pytest.approx(0.2)

    snap, meta = read_snapshot(cfg.out_dir / "phi_20")
    assert meta["time"] == pytest.approx(0.2)
    exact = exact_phi(cfg.grid, 0.2)
    assert np.max(np.abs(snap.values - exact.values)) < 0.02
