"""Log-log convergence plots with reference-slope guide lines."""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

from .io import read_convergence

__all__ = ["LoglogResult", "plot_loglog", "main"]


@dataclass(frozen=True)
class LoglogResult:
    out_path: Path
    fitted: dict      # column -> least-squares slope
    guides: tuple     # reference slopes drawn


def plot_loglog(csv_path, out_path, *, reference_slopes=(1, 2, 3),
                title=None, dpi=150):
    """Plot err_phi and err_u against dt on log-log axes.

    Diverged rows are dropped. Each requested reference slope gets a
    dashed guide line anchored at the coarsest converged point, and the
    fitted slopes go into the legend and the returned result.
    """
    data = read_convergence(csv_path)
    keep = data["diverged"] < 0.5
    dt = data["dt"][keep]
    if dt.size < 2:
        raise ValueError(f"{csv_path}: need at least two converged rows")

    fig = Figure(figsize=(5.4, 4.4), dpi=dpi)
    ax = fig.subplots()
    fitted = {}
    for column, marker in (("err_phi", "o"), ("err_u", "s")):
        err = data[column][keep]
        slope = float(np.polyfit(np.log(dt), np.log(err), 1)[0])
        fitted[column] = slope
        ax.loglog(dt, err, marker=marker, linewidth=1.2,
                  label=f"{column} (fit {slope:.2f})")

    anchor_err = max(data[c][keep].max() for c in ("err_phi", "err_u"))
    dt_max = dt.max()
    guide_x = np.array([dt.min(), dt_max])
    for slope in reference_slopes:
        guide = anchor_err * 1.6 * (guide_x / dt_max) ** slope
        ax.loglog(guide_x, guide, "--", color="gray", linewidth=0.9)
        ax.annotate(f"{slope}", (guide_x[0], guide[0]),
                    textcoords="offset points", xytext=(4, -2),
                    fontsize=8, color="gray")

    ax.set_xlabel("dt")
    ax.set_ylabel("L2 error at final time")
    ax.grid(True, which="both", alpha=0.25)
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, bbox_inches="tight")
    return LoglogResult(out_path, fitted, tuple(reference_slopes))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Log-log convergence plot from a solver sweep table."
    )
    parser.add_argument("table", help="convergence csv")
    parser.add_argument("--out", required=True, help="output PNG path")
    parser.add_argument("--slopes", nargs="+", type=float, default=[1, 2, 3],
                        help="reference slopes to draw")
    parser.add_argument("--title", default=None)
    parser.add_argument("--dpi", type=int, default=150)
    args = parser.parse_args(argv)
    try:
        result = plot_loglog(
            args.table, args.out, reference_slopes=tuple(args.slopes),
            title=args.title, dpi=args.dpi,
        )
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    fits = ", ".join(f"{k} {v:.2f}" for k, v in result.fitted.items())
    print(f"wrote {result.out_path} (fitted {fits})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
