"""Command line front end.

Subcommands
-----------
run        march a configured simulation and write its artifacts
converge   step-size sweep on a forced benchmark, printing fitted orders
stability  large-step sweep with and without stabilization
check      fast self-test of the core numerics
info       version, kernel backend and packaged presets

Exit codes: 0 success, 2 configuration problem, 3 divergence,
4 a verification or stability criterion failed.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .config import (
    build_sim_config,
    build_study,
    list_presets,
    load_config,
)
from .errors import ConfigError, DendrixError
from .manufactured import convergence_study
from .model import ModelParams, anisotropy_values
from .simulation import DIAGNOSTIC_COLUMNS, SimConfig, run
from .spectral import Grid, RealField, to_real, to_spectral
from .stepping import Stepper

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_FAILED = 4

ENERGY_DROP_RTOL = 1e-8  # slack on "non-increasing", relative to E(0)


def _add_common(parser, *, needs_config=True):
    if needs_config:
        parser.add_argument(
            "--config", required=True,
            help="config file path or packaged preset name",
        )
        parser.add_argument(
            "--set", dest="overrides", action="append", default=[],
            metavar="KEY=VALUE", help="override a config key (repeatable)",
        )
        parser.add_argument(
            "--preset", choices=("full", "desk"), default="full",
            help="apply the [desk] overlay for a quick run",
        )
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument(
        "--k", type=int, choices=(1, 2, 3), default=None,
        help="multistep order, overriding the config",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dendrix",
        description="Spectral solver for anisotropic dendritic solidification.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    _add_common(sub.add_parser("run", help="run a configured simulation"))
    _add_common(sub.add_parser("converge", help="temporal convergence sweep"))
    _add_common(sub.add_parser("stability", help="large time-step sweep"))
    check = sub.add_parser("check", help="fast numerical self-test")
    check.add_argument("--out", default=None, help=argparse.SUPPRESS)
    sub.add_parser("info", help="show version, backend and presets")
    return parser


def _load(args):
    cfg = load_config(args.config, preset=args.preset, overrides=args.overrides)
    if args.k is not None:
        cfg.set("scheme.order", args.k)
    return cfg


def cmd_run(args) -> int:
    cfg = _load(args)
    sim = build_sim_config(cfg, out_dir=args.out)
    result = run(sim)
    print(f"status          {result.status}")
    print(f"steps           {result.steps_completed}")
    print(f"final time      {result.final_time:g}")
    print(f"final energy    {result.final_energy:.12g}")
    print(f"final q         {result.final_q:.12g}")
    print(f"crystal area    {result.final_area:.12g}")
    c1, c2, c3 = result.zeta_case_counts
    print(f"relax cases     1: {c1}  2: {c2}  3: {c3}")
    print(f"wall seconds    {result.wall_seconds:.2f}")
    print(f"outputs in      {result.out_dir}")
    if result.status == "diverged":
        print(
            f"run diverged at step {result.divergence_step}; partial outputs kept",
            file=sys.stderr,
        )
        return EXIT_DIVERGED
    return EXIT_OK


def cmd_converge(args) -> int:
    cfg = _load(args)
    case, dts = build_study(cfg)
    order = cfg.get("scheme.order")
    result = convergence_study(case, order, dts)

    print(f"case {case.name}, order {order}, N = {case.grid.shape[0]}, "
          f"T = {case.final_time:g}")
    print(f"{'dt':>12}  {'err_phi':>12}  {'err_u':>12}")
    for row in result.rows:
        if row.diverged:
            print(f"{row.dt:>12.6g}  {'diverged':>12}  {'diverged':>12}")
        else:
            print(f"{row.dt:>12.6g}  {row.err_phi:>12.4e}  {row.err_u:>12.4e}")
    print(f"fitted order: phi {result.slope_phi:.3f}, u {result.slope_u:.3f}")

    out = Path(args.out) if args.out else Path(cfg.get("output.dir"))
    out.mkdir(parents=True, exist_ok=True)
    table = out / f"convergence_k{order}.csv"
    with open(table, "w", newline="\n") as sink:
        sink.write("dt,err_phi,err_u,diverged\n")
        for row in result.rows:
            sink.write(
                f"{row.dt:.17g},{row.err_phi:.17g},{row.err_u:.17g},"
                f"{int(row.diverged)}\n"
            )
    print(f"table written to {table}")
    if any(row.diverged for row in result.rows):
        print("some step sizes diverged", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_OK


def _energy_series(out_dir: Path):
    with open(out_dir / "diagnostics.csv", newline="") as source:
        return [float(row["E"]) for row in csv.DictReader(source)]


def _is_non_increasing(energies, rtol=ENERGY_DROP_RTOL) -> bool:
    slack = rtol * energies[0]
    return all(b <= a + slack for a, b in zip(energies, energies[1:]))


def cmd_stability(args) -> int:
    cfg = _load(args)
    sim_base = build_sim_config(cfg, out_dir=args.out)
    dts = cfg.get("stability.dts")
    horizon = sim_base.dt * sim_base.n_steps
    root = sim_base.out_dir
    root.mkdir(parents=True, exist_ok=True)

    variants = (
        ("stabilized", sim_base.params),
        ("unstabilized", dataclasses.replace(sim_base.params, s1=0.0, s2=0.0)),
    )
    rows = []
    print(f"{'dt':>8}  {'variant':>12}  {'status':>10}  {'energy':>16}")
    for dt in dts:
        n_steps = max(1, round(horizon / dt))
        for label, params in variants:
            sub = root / f"{label}_dt{dt:g}"
            sim = SimConfig(
                grid=sim_base.grid, params=params, dt=dt, n_steps=n_steps,
                initial=sim_base.initial, out_dir=sub, order=sim_base.order,
                dealias=sim_base.dealias, snapshot_every=0,
                diagnostics_every=1, seed=sim_base.seed,
            )
            result = run(sim)
            if result.status == "diverged":
                verdict = "diverged"
            elif _is_non_increasing(_energy_series(sub)):
                verdict = "non-increasing"
            else:
                verdict = "non-monotone"
            rows.append({
                "dt": dt, "variant": label, "status": result.status,
                "energy": verdict, "dir": str(sub),
            })
            print(f"{dt:>8g}  {label:>12}  {result.status:>10}  {verdict:>16}")

    (root / "stability_summary.json").write_text(
        json.dumps({"t_end": horizon, "runs": rows}, indent=1) + "\n"
    )
    print(f"summary written to {root / 'stability_summary.json'}")

    bad = [
        row for row in rows
        if row["variant"] == "stabilized" and row["energy"] != "non-increasing"
    ]
    if bad:
        worst = ", ".join(f"dt={row['dt']:g}" for row in bad)
        print(f"stabilized runs failed the energy test: {worst}",
              file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


# -- self test ----------------------------------------------------------------


def _check_transforms():
    rng = np.random.default_rng(7)
    grid = Grid((64, 64))
    values = rng.standard_normal(grid.shape)
    field = RealField(grid, values)
    back = to_real(to_spectral(field))
    round_trip = float(np.max(np.abs(back.values - values)))

    full = np.fft.fftn(values, norm="forward")
    parseval = abs(
        grid.volume * float(np.sum(np.abs(full) ** 2))
        - float(np.sum(values**2)) * grid.cell_volume
    ) / (float(np.sum(values**2)) * grid.cell_volume)

    x, y = grid.coords()
    tone = RealField(grid, np.sin(3 * x) * np.cos(2 * y))
    from .spectral import gradient

    gx, gy = gradient(tone)
    exact = 3 * np.cos(3 * x) * np.cos(2 * y)
    derivative = float(np.max(np.abs(gx.values - exact)))
    return [
        ("transform round trip <= 1e-12", round_trip, 1e-12),
        ("Parseval identity <= 1e-12", parseval, 1e-12),
        ("tone derivative <= 1e-11", derivative, 1e-11),
    ]


def _check_anisotropy():
    rng = np.random.default_rng(11)
    quartic = ModelParams(
        tau=1.0, eps=1.0, lam=1.0, latent_heat=1.0, diffusivity=1.0,
        sigma=0.05, folds=4, aniso_form="quartic",
    )
    trig = dataclasses.replace(quartic, aniso_form="trig")

    n = 10_000
    angle = rng.uniform(0.0, 2 * np.pi, n)
    mag = rng.uniform(0.1, 10.0, n)
    px, py = mag * np.cos(angle), mag * np.sin(angle)
    m_q, h_q, _ = anisotropy_values((px, py), quartic)
    m_t, h_t, _ = anisotropy_values((px, py), trig)
    factor_gap = float(np.max(np.abs(m_q - m_t)))
    bounds_ok = float(np.max(np.maximum(
        (1.0 - quartic.sigma) - m_q, m_q - (1.0 + quartic.sigma)
    )))

    delta = 1e-7
    worst = 0.0
    for i in range(0, n, 100):
        p = np.array([px[i], py[i]])
        scale = np.linalg.norm(p)
        step = delta * scale
        grad_fd = np.empty(2)
        for j in range(2):
            plus, minus = p.copy(), p.copy()
            plus[j] += step
            minus[j] -= step
            m_plus = float(anisotropy_values((plus[0], plus[1]), quartic)[0][0])
            m_minus = float(anisotropy_values((minus[0], minus[1]), quartic)[0][0])
            grad_fd[j] = (m_plus - m_minus) / (2 * step)
        h_here = np.array([h_q[0][i], h_q[1][i]])
        denom = max(float(np.linalg.norm(grad_fd)), 1e-30)
        worst = max(worst, float(np.linalg.norm(h_here - grad_fd)) / denom)
    return [
        ("quartic/trig factor gap <= 1e-12", factor_gap, 1e-12),
        ("anisotropy bounds hold", bounds_ok, 0.0),
        ("gradient of m vs finite differences <= 1e-6", worst, 1e-6),
    ]


def _check_monotonicity():
    grid = Grid((64, 64))
    params = ModelParams(
        tau=100.0, eps=0.15, lam=1.0, latent_heat=1.0, diffusivity=0.225,
        sigma=0.05, folds=4, s1=4.0, s2=4.0, aniso_form="quartic",
    )
    x, y = grid.coords()
    r = np.sqrt((x - np.pi) ** 2 + (y - np.pi) ** 2)
    phi0 = RealField(grid, np.tanh((1.5 - r) / 0.2))
    u0 = RealField(grid, np.full(grid.shape, -0.55))
    stepper = Stepper(grid, params, 0.05, 2)
    stepper.start(phi0, u0)
    worst_rise = -np.inf
    q_prev = stepper.q
    for _ in range(20):
        report = stepper.advance()
        worst_rise = max(worst_rise, (report.q - q_prev) / abs(q_prev))
        q_prev = report.q
    solves_off = abs(stepper.linear_solves - 2 * 20)
    return [
        ("q never increases (rel) <= 1e-12", float(worst_rise), 1e-12),
        ("two linear solves per step", float(solves_off), 0.0),
    ]


def cmd_check(args) -> int:
    del args
    failures = 0
    for name, value, bound in (
        _check_transforms() + _check_anisotropy() + _check_monotonicity()
    ):
        ok = value <= bound
        failures += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}  (measured {value:.3e})")
    if failures:
        print(f"{failures} check(s) failed", file=sys.stderr)
        return EXIT_FAILED
    print("all checks passed")
    return EXIT_OK


def cmd_info(args) -> int:
    del args
    print(f"dendrix {__version__}")
    print(f"kernel backend: {kernels.BACKEND} "
          f"(available: {', '.join(kernels.available_backends())})")
    print(f"presets: {', '.join(list_presets())}")
    print(f"diagnostics columns: {','.join(DIAGNOSTIC_COLUMNS)}")
    print("exit codes: 0 ok, 2 config error, 3 divergence, 4 check failed")
    return EXIT_OK


_COMMANDS = {
    "run": cmd_run,
    "converge": cmd_converge,
    "stability": cmd_stability,
    "check": cmd_check,
    "info": cmd_info,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DendrixError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
