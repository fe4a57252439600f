"""Behavior of the individual plot functions and their CLI wrappers."""

import numpy as np
import pytest

from dendrix_viz import PlotJob, run_job
from dendrix_viz.contours import main as contours_main, plot_contours
from dendrix_viz.curves import main_area, main_energy, plot_scalar_curves
from dendrix_viz.io import FormatError
from dendrix_viz.isosurface import main as isosurface_main, plot_isosurface
from dendrix_viz.loglog import main as loglog_main, plot_loglog

from conftest import tanh_ball, tanh_disc, write_csv, write_snapshot


def second_order_table(tmp_path, with_diverged=False):
    dts = np.array([0.2, 0.1, 0.05, 0.025])
    rows = [(dt, 0.3 * dt**2, 0.1 * dt**2, 0) for dt in dts]
    if with_diverged:
        rows.insert(0, (0.4, float("inf"), float("inf"), 1))
    return write_csv(tmp_path / "convergence_k2.csv",
                     ("dt", "err_phi", "err_u", "diverged"), rows)


# ---------------------------------------------------------------- contours

def test_contours_uniform_field_has_no_zero_level(snapshot_dir, tmp_path):
    base = write_snapshot(snapshot_dir, np.full((32, 32), 1.0))
    out = tmp_path / "flat.png"
    result = plot_contours([base], out)
    assert out.exists() and out.stat().st_size > 0
    assert len(result.panels) == 1
    assert result.panels[0].has_zero_level is False


def test_contours_disc_crosses_zero(snapshot_dir, tmp_path):
    base = write_snapshot(snapshot_dir, tanh_disc(), time=2.5)
    result = plot_contours([base], tmp_path / "disc.png", levels=15)
    panel = result.panels[0]
    assert panel.has_zero_level is True
    assert panel.time == 2.5
    assert panel.field == "phi"


def test_contours_multiple_panels(snapshot_dir, tmp_path):
    flat = write_snapshot(snapshot_dir, np.full((48, 48), -1.0), step=0)
    disc = write_snapshot(snapshot_dir, tanh_disc(), step=50, time=0.5)
    result = plot_contours([flat, disc], tmp_path / "pair.png")
    assert [p.has_zero_level for p in result.panels] == [False, True]
    assert result.shape == (48, 48)


def test_contours_shape_mismatch_is_rejected(snapshot_dir, tmp_path):
    a = write_snapshot(snapshot_dir, np.zeros((16, 16)), step=0)
    b = write_snapshot(snapshot_dir, np.zeros((32, 32)), step=1)
    with pytest.raises(ValueError, match=r"\(16, 16\) vs \(32, 32\)"):
        plot_contours([a, b], tmp_path / "bad.png")


def test_contours_reject_3d(snapshot_dir, tmp_path):
    base = write_snapshot(snapshot_dir, np.zeros((4, 4, 4)))
    with pytest.raises(ValueError, match="2-D"):
        plot_contours([base], tmp_path / "bad.png")


def test_contours_reject_empty(tmp_path):
    with pytest.raises(ValueError, match="at least one"):
        plot_contours([], tmp_path / "none.png")


def test_contours_missing_sidecar_propagates(snapshot_dir, tmp_path):
    base = write_snapshot(snapshot_dir, tanh_disc())
    base.with_suffix(".json").unlink()
    with pytest.raises(FormatError, match="sidecar"):
        plot_contours([base], tmp_path / "x.png")


def test_contours_cli_reports_bad_input(snapshot_dir, tmp_path, capsys):
    base = write_snapshot(snapshot_dir, tanh_disc())
    base.with_suffix(".json").unlink()
    code = contours_main([str(base), "--out", str(tmp_path / "x.png")])
    assert code == 1
    err = capsys.readouterr().err
    assert err.startswith("error:") and "sidecar" in err


def test_contours_cli(snapshot_dir, tmp_path, capsys):
    base = write_snapshot(snapshot_dir, tanh_disc())
    out = tmp_path / "cli.png"
    code = contours_main([str(base), "--out", str(out), "--levels", "11"])
    assert code == 0
    assert out.exists()
    assert "1 with a zero contour" in capsys.readouterr().out


# ------------------------------------------------------------------ curves

def test_energy_curves_series(diagnostics_csv, tmp_path):
    out = tmp_path / "energy.png"
    result = plot_scalar_curves([diagnostics_csv], ("E", "q"), out)
    assert out.exists()
    assert set(result.series) == {"E", "q"}
    t, energy = result.series["E"]
    assert t[0] == 0.0 and energy[0] == 5.0
    assert np.all(np.diff(energy) <= 0)


def test_curves_multiple_inputs_get_directory_labels(tmp_path):
    columns = ("step", "t", "E", "E1", "q", "qbar", "xi", "eta", "zeta",
               "zeta_case", "H", "area")
    labels = []
    paths = []
    for name in ("run_a", "run_b"):
        run_dir = tmp_path / name
        run_dir.mkdir()
        rows = [(i, 0.1 * i, 3.0 - i, 2.0, 3.0, 3.0, 1, 1, 1, 1, 0, 0.1)
                for i in range(3)]
        paths.append(write_csv(run_dir / "diagnostics.csv", columns, rows))
        labels.append(f"{name}: area")
    result = plot_scalar_curves(paths, ("area",), tmp_path / "areas.png")
    assert sorted(result.series) == labels


def test_curves_missing_column_is_named(diagnostics_csv, tmp_path):
    with pytest.raises(FormatError, match="'enthalpy'"):
        plot_scalar_curves([diagnostics_csv], ("enthalpy",),
                           tmp_path / "x.png")


def test_curves_reject_empty_inputs(tmp_path):
    with pytest.raises(ValueError, match="at least one diagnostics"):
        plot_scalar_curves([], ("E",), tmp_path / "x.png")
    with pytest.raises(ValueError, match="at least one column"):
        plot_scalar_curves(["whatever.csv"], (), tmp_path / "x.png")


def test_energy_cli(diagnostics_csv, tmp_path, capsys):
    out = tmp_path / "e.png"
    code = main_energy([str(diagnostics_csv), "--out", str(out), "--logy"])
    assert code == 0
    assert out.exists()
    assert "2 curves" in capsys.readouterr().out


def test_area_cli_accepts_run_dir(diagnostics_csv, tmp_path):
    out = tmp_path / "a.png"
    code = main_area([str(diagnostics_csv.parent), "--out", str(out)])
    assert code == 0
    assert out.exists()


def test_curves_cli_reports_missing_column(diagnostics_csv, tmp_path, capsys):
    code = main_energy([str(diagnostics_csv), "--out", str(tmp_path / "x.png"),
                        "--columns", "entropy"])
    assert code == 1
    assert "'entropy'" in capsys.readouterr().err


# ------------------------------------------------------------------ loglog

def test_loglog_fits_slopes(tmp_path):
    table = second_order_table(tmp_path)
    out = tmp_path / "orders.png"
    result = plot_loglog(table, out)
    assert out.exists()
    assert result.guides == (1, 2, 3)
    assert result.fitted["err_phi"] == pytest.approx(2.0, abs=1e-9)
    assert result.fitted["err_u"] == pytest.approx(2.0, abs=1e-9)


def test_loglog_drops_diverged_rows(tmp_path):
    table = second_order_table(tmp_path, with_diverged=True)
    result = plot_loglog(table, tmp_path / "orders.png")
    assert np.isfinite(result.fitted["err_phi"])
    assert result.fitted["err_phi"] == pytest.approx(2.0, abs=1e-9)


def test_loglog_needs_two_converged_rows(tmp_path):
    table = write_csv(tmp_path / "thin.csv",
                      ("dt", "err_phi", "err_u", "diverged"),
                      [(0.1, 1e-2, 1e-2, 0), (0.05, float("inf"), 1.0, 1)])
    with pytest.raises(ValueError, match="two converged"):
        plot_loglog(table, tmp_path / "x.png")


def test_loglog_cli_reports_thin_table(tmp_path, capsys):
    table = write_csv(tmp_path / "thin.csv",
                      ("dt", "err_phi", "err_u", "diverged"),
                      [(0.1, 1e-2, 1e-2, 0)])
    code = loglog_main([str(table), "--out", str(tmp_path / "x.png")])
    assert code == 1
    assert "two converged" in capsys.readouterr().err


def test_loglog_cli_custom_guides(tmp_path, capsys):
    table = second_order_table(tmp_path)
    out = tmp_path / "cli.png"
    code = loglog_main([str(table), "--out", str(out),
                        "--slopes", "2", "3"])
    assert code == 0
    assert out.exists()
    captured = capsys.readouterr().out
    assert "err_phi" in captured


# -------------------------------------------------------------- isosurface

def test_isosurface_from_ball(snapshot_dir, tmp_path):
    base = write_snapshot(snapshot_dir, tanh_ball(), time=1.0)
    out = tmp_path / "ball.png"
    result = plot_isosurface(base, out)
    assert out.exists() and out.stat().st_size > 0
    assert result.n_vertices > 0
    assert result.level == 0.0


def test_isosurface_uniform_field_renders_empty(snapshot_dir, tmp_path):
    base = write_snapshot(snapshot_dir, np.full((8, 8, 8), -1.0))
    out = tmp_path / "empty.png"
    result = plot_isosurface(base, out)
    assert out.exists()
    assert result.n_vertices == 0


def test_isosurface_rejects_2d(snapshot_dir, tmp_path):
    base = write_snapshot(snapshot_dir, np.zeros((8, 8)))
    with pytest.raises(ValueError, match="3-D"):
        plot_isosurface(base, tmp_path / "x.png")


def test_isosurface_cli_reports_2d_input(snapshot_dir, tmp_path, capsys):
    base = write_snapshot(snapshot_dir, np.zeros((8, 8)))
    code = isosurface_main([str(base), "--out", str(tmp_path / "x.png")])
    assert code == 1
    assert "3-D" in capsys.readouterr().err


def test_isosurface_cli(snapshot_dir, tmp_path, capsys):
    base = write_snapshot(snapshot_dir, tanh_ball(n=16))
    out = tmp_path / "cli.png"
    code = isosurface_main([str(base), "--out", str(out), "--level", "0.2"])
    assert code == 0
    assert out.exists()
    assert "level 0.2" in capsys.readouterr().out


# ---------------------------------------------------------------- plot jobs

def test_run_job_dispatches_each_kind(snapshot_dir, tmp_path,
                                      diagnostics_csv):
    disc = write_snapshot(snapshot_dir, tanh_disc(), step=0)
    ball = write_snapshot(snapshot_dir, tanh_ball(n=16), field="phi3d")
    table = second_order_table(tmp_path)

    jobs = [
        PlotJob("contours", (disc,), tmp_path / "j1.png"),
        PlotJob("energy_curves", (diagnostics_csv,), tmp_path / "j2.png"),
        PlotJob("area_curves", (diagnostics_csv,), tmp_path / "j3.png",
                {"title": "interface area"}),
        PlotJob("loglog_orders", (table,), tmp_path / "j4.png",
                {"reference_slopes": (2,)}),
        PlotJob("isosurface_3d", (ball,), tmp_path / "j5.png"),
    ]
    for job in jobs:
        result = run_job(job)
        assert job.out_path.exists(), job.kind
        assert result.out_path == job.out_path


def test_plot_job_validation(tmp_path):
    with pytest.raises(ValueError, match="unknown plot kind"):
        PlotJob("sparkline", ("a.csv",), tmp_path / "x.png")
    with pytest.raises(ValueError, match="at least one input"):
        PlotJob("contours", (), tmp_path / "x.png")


def test_run_job_single_input_kinds(tmp_path):
    job = PlotJob("loglog_orders", ("a.csv", "b.csv"), tmp_path / "x.png")
    with pytest.raises(ValueError, match="exactly one"):
        run_job(job)
    job = PlotJob("isosurface_3d", ("a", "b"), tmp_path / "x.png")
    with pytest.raises(ValueError, match="exactly one"):
        run_job(job)
