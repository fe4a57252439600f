"""Scalar time series from diagnostics files: energy, q, crystal area."""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from matplotlib.figure import Figure

from .io import read_diagnostics

__all__ = ["CurvesResult", "plot_scalar_curves", "main_energy", "main_area"]


@dataclass(frozen=True)
class CurvesResult:
    out_path: Path
    series: dict  # label -> (t, values)


def _label_for(path: Path, n_inputs: int, column: str) -> str:
    if n_inputs == 1:
        return column
    parent = path.parent.name if path.name == "diagnostics.csv" else path.stem
    return f"{parent}: {column}"


def plot_scalar_curves(csv_paths, columns, out_path, *, logy=False,
                       ylabel=None, title=None, dpi=150):
    """Plot the named diagnostics columns against time, one line each.

    ``csv_paths`` may mix run directories and csv files; every input
    contributes one line per requested column. Missing columns are
    reported by name.
    """
    paths = [Path(p) for p in csv_paths]
    if not paths:
        raise ValueError("need at least one diagnostics input")
    columns = tuple(columns)
    if not columns:
        raise ValueError("need at least one column to plot")

    fig = Figure(figsize=(6.4, 4.2), dpi=dpi)
    ax = fig.subplots()
    series = {}
    for path in paths:
        data = read_diagnostics(path, ("t",) + columns)
        for column in columns:
            label = _label_for(Path(path), len(paths), column)
            series[label] = (data["t"], data[column])
            ax.plot(data["t"], data[column], label=label, linewidth=1.4)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel(ylabel or ", ".join(columns))
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, bbox_inches="tight")
    return CurvesResult(out_path, series)


def _main(default_columns, description, argv):
    parser = argparse.ArgumentParser(description=description)
    parser.add_argument("inputs", nargs="+",
                        help="diagnostics.csv files or run directories")
    parser.add_argument("--out", required=True, help="output PNG path")
    parser.add_argument("--columns", nargs="+", default=list(default_columns))
    parser.add_argument("--logy", action="store_true")
    parser.add_argument("--title", default=None)
    parser.add_argument("--dpi", type=int, default=150)
    args = parser.parse_args(argv)
    try:
        result = plot_scalar_curves(
            args.inputs, args.columns, args.out, logy=args.logy,
            title=args.title, dpi=args.dpi,
        )
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {result.out_path} ({len(result.series)} curves)")
    return 0


def main_energy(argv=None) -> int:
    return _main(
        ("E", "q"),
        "Energy and auxiliary-variable curves from solver diagnostics.",
        argv,
    )


def main_area(argv=None) -> int:
    return _main(
        ("area",),
        "Crystal area growth curves from solver diagnostics.",
        argv,
    )


if __name__ == "__main__":
    raise SystemExit(main_energy())
