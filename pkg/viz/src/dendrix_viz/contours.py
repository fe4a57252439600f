"""Contour panels: one filled-contour subplot per snapshot.

The solid-liquid interface is the zero level set of the phase field, so
every panel overlays a highlighted zero contour on the filled map
whenever the field actually crosses zero.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

from .io import read_snapshot

__all__ = ["PanelInfo", "ContoursResult", "plot_contours", "main"]

ZERO_LINE_COLOR = "#111111"


@dataclass(frozen=True)
class PanelInfo:
    time: float
    field: str
    has_zero_level: bool


@dataclass(frozen=True)
class ContoursResult:
    out_path: Path
    panels: tuple
    shape: tuple


def plot_contours(snapshots, out_path, *, levels=21, cmap="coolwarm",
                  level_of_interest=0.0, dpi=150, title=None):
    """Render a row of filled-contour panels, one per snapshot.

    All snapshots must share the same grid shape. Returns a
    :class:`ContoursResult` whose panels record whether the highlighted
    level is present in each field.
    """
    paths = [Path(p) for p in snapshots]
    if not paths:
        raise ValueError("need at least one snapshot")
    fields, metas = [], []
    for path in paths:
        values, meta = read_snapshot(path)
        if meta["dim"] != 2:
            raise ValueError(f"{path}: contour panels need 2-D snapshots")
        fields.append(values)
        metas.append(meta)
    shape = fields[0].shape
    for path, values in zip(paths[1:], fields[1:]):
        if values.shape != shape:
            raise ValueError(
                f"snapshot shapes differ: {shape} vs {values.shape} ({path})"
            )

    n = len(fields)
    fig = Figure(figsize=(3.2 * n, 3.4), dpi=dpi)
    axes = fig.subplots(1, n, squeeze=False)[0]
    panels = []
    for ax, values, meta in zip(axes, fields, metas):
        lx, ly = meta["lengths"]
        x = np.linspace(0.0, lx, values.shape[0], endpoint=False)
        y = np.linspace(0.0, ly, values.shape[1], endpoint=False)
        # samples are indexed [i, j] = (x_i, y_j); contourf wants X along
        # the second axis
        ax.contourf(x, y, values.T, levels=levels, cmap=cmap)
        crosses = bool(
            values.min() < level_of_interest < values.max()
        )
        if crosses:
            ax.contour(
                x, y, values.T, levels=[level_of_interest],
                colors=ZERO_LINE_COLOR, linewidths=1.2,
            )
        ax.set_aspect("equal")
        ax.set_title(f"{meta['field']}  t = {meta['time']:g}", fontsize=10)
        ax.set_xticks([])
        ax.set_yticks([])
        panels.append(PanelInfo(meta["time"], meta["field"], crosses))
    if title:
        fig.suptitle(title)
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, bbox_inches="tight")
    return ContoursResult(out_path, tuple(panels), shape)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Filled-contour panels from solver snapshots."
    )
    parser.add_argument("snapshots", nargs="+",
                        help="snapshot base paths (or .bin/.json)")
    parser.add_argument("--out", required=True, help="output PNG path")
    parser.add_argument("--levels", type=int, default=21)
    parser.add_argument("--cmap", default="coolwarm")
    parser.add_argument("--title", default=None)
    parser.add_argument("--dpi", type=int, default=150)
    args = parser.parse_args(argv)
    try:
        result = plot_contours(
            args.snapshots, args.out, levels=args.levels, cmap=args.cmap,
            dpi=args.dpi, title=args.title,
        )
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    zero = sum(p.has_zero_level for p in result.panels)
    print(f"wrote {result.out_path} ({len(result.panels)} panels, "
          f"{zero} with a zero contour)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
