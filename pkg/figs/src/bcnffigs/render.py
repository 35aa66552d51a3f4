"""Static figures from sweep CSVs, crisis-curve CSVs and portrait bundles.

Everything here reads the plain file formats written by the bcnflab command
line and never imports the simulation code, so the two packages stay
coupled only through those formats.  Output is raster PNG with metadata
stripped, which keeps repeated renders byte-identical.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

SWEEP_COLUMNS = (
    "tau_L",
    "tau_R",
    "region_code",
    "rn_index",
    "phi",
    "phi_g",
    "J1",
    "J2",
    "sum_stable",
    "thm1",
    "thm2",
)
TRACE_COLUMNS = ("tau_L", "tau_R_star", "residual", "iterations", "depth")

DEFAULT_REGION_COLORS = {
    "R0": "#ffd93d",
    "R1": "#9e9e9e",
    "outside": "#ffffff",
    "unresolved": "#d8d8e8",
}
DEFAULT_MANIFOLD_COLORS = {"stable": "tab:blue", "unstable": "tab:red"}
CYCLE_COLOR = "tab:green"


class SchemaError(ValueError):
    """An input file does not match the expected column layout."""


@dataclass
class FigureSpec:
    """Output path plus the style choices the command line exposes."""

    out: str | Path
    dpi: int = 150
    figsize: tuple[float, float] = (6.0, 5.0)
    title: str | None = None
    xlim: tuple[float, float] | None = None
    ylim: tuple[float, float] | None = None
    marker: tuple[float, float] | None = None
    region_colors: dict[str, str] = field(
        default_factory=lambda: dict(DEFAULT_REGION_COLORS)
    )
    manifold_colors: dict[str, str] = field(
        default_factory=lambda: dict(DEFAULT_MANIFOLD_COLORS)
    )


def _read_rows(path: str | Path, columns: tuple[str, ...], what: str) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        names = reader.fieldnames or []
        missing = [c for c in columns if c not in names]
        if missing:
            raise SchemaError(f"{what} CSV missing columns: {', '.join(missing)}")
        return list(reader)


def _region_color(code: str, colors: dict[str, str]) -> str:
    if code in colors:
        return colors[code]
    if code.startswith("R") and code[1:].isdigit():
        # deeper renormalisation levels darken from the R1 grey
        shade = max(0.2, 0.62 - 0.12 * (int(code[1:]) - 1))
        return str(shade)
    return colors.get("outside", "#ffffff")


def _edges(values: np.ndarray) -> np.ndarray:
    """Cell boundaries around sorted sample positions, robust to a 1-cell axis."""
    if len(values) == 1:
        half = 0.5 if values[0] == 0 else 0.05 * max(1.0, abs(values[0]))
        return np.array([values[0] - half, values[0] + half])
    mids = 0.5 * (values[:-1] + values[1:])
    first = values[0] - (mids[0] - values[0])
    last = values[-1] + (values[-1] - mids[-1])
    return np.concatenate([[first], mids, [last]])


def _finish(fig, ax, spec: FigureSpec) -> Path:
    if spec.title:
        ax.set_title(spec.title)
    if spec.xlim:
        ax.set_xlim(*spec.xlim)
    if spec.ylim:
        ax.set_ylim(*spec.ylim)
    out = Path(spec.out)
    fig.savefig(out, dpi=spec.dpi, metadata={"Software": None}, facecolor="white")
    plt.close(fig)
    return out


def render_slice(
    sweep_csv: str | Path,
    ht_csv: str | Path | None,
    spec: FigureSpec,
) -> Path:
    """Region-coloured parameter slice with boundary, stripe and curve overlays.

    The sweep grid is rebuilt from the tau_L and tau_R columns, so row order
    does not matter.  Cells are painted by region code, the phi = 0 level is
    contoured, cells where the chaos theorem applies are hatched, and the
    crisis curve is drawn when a trace CSV is supplied.  A header-only sweep
    yields labelled blank axes.
    """
    rows = _read_rows(sweep_csv, SWEEP_COLUMNS, "sweep")
    fig, ax = plt.subplots(figsize=spec.figsize)
    ax.set_xlabel("tau_L")
    ax.set_ylabel("tau_R")

    if rows:
        xs = np.array(sorted({float(r["tau_L"]) for r in rows}))
        ys = np.array(sorted({float(r["tau_R"]) for r in rows}))
        xi = {v: i for i, v in enumerate(xs)}
        yi = {v: i for i, v in enumerate(ys)}

        codes = np.full((len(ys), len(xs)), "outside", dtype=object)
        phi_grid = np.full((len(ys), len(xs)), np.nan)
        striped = np.zeros((len(ys), len(xs)))
        for r in rows:
            i, j = yi[float(r["tau_R"])], xi[float(r["tau_L"])]
            codes[i, j] = r["region_code"]
            if r["phi"]:
                phi_grid[i, j] = float(r["phi"])
            striped[i, j] = 1.0 if r["thm2"] == "true" else 0.0

        order = sorted({str(c) for c in codes.ravel()})
        lookup = {c: k for k, c in enumerate(order)}
        img = np.vectorize(lookup.get)(codes)
        cmap = matplotlib.colors.ListedColormap(
            [_region_color(c, spec.region_colors) for c in order]
        )
        ax.pcolormesh(
            _edges(xs), _edges(ys), img, cmap=cmap, vmin=-0.5, vmax=len(order) - 0.5
        )

        if len(xs) > 1 and len(ys) > 1:
            if np.isfinite(phi_grid).sum() > 3:
                ax.contour(xs, ys, phi_grid, levels=[0.0], colors="black", linewidths=1.2)
            if striped.any() and not striped.all():
                hatch = ax.contourf(
                    xs, ys, striped, levels=[0.5, 1.5], colors="none", hatches=["///"]
                )
                hatch.set_edgecolor((0.0, 0.0, 0.0, 0.5))
                hatch.set_linewidth(0.0)

    if ht_csv is not None:
        trace = _read_rows(ht_csv, TRACE_COLUMNS, "trace")
        pts = sorted(
            (float(r["tau_L"]), float(r["tau_R_star"]))
            for r in trace
            if r["tau_R_star"]
        )
        if pts:
            arr = np.array(pts)
            ax.plot(arr[:, 0], arr[:, 1], color="black", linewidth=1.8)

    if spec.marker is not None:
        ax.plot(*spec.marker, marker="s", color="black", markersize=7, linestyle="none")

    return _finish(fig, ax, spec)


def _paint_portrait(ax, bundle: dict, spec: FigureSpec) -> None:
    for key, style in (("omega", "-"), ("f_omega", "--")):
        poly = bundle.get(key)
        if poly:
            v = np.array(poly + [poly[0]])
            ax.plot(v[:, 0], v[:, 1], color="0.4", linewidth=0.8, linestyle=style)

    att = bundle.get("attractor")
    if att:
        pts = np.array(att["points"])
        ax.plot(pts[:, 0], pts[:, 1], ".", color="0.15", markersize=0.6)

    for man in bundle.get("manifolds", []):
        v = np.array(man["vertices"])
        color = spec.manifold_colors.get(man["kind"], "black")
        ax.plot(v[:, 0], v[:, 1], color=color, linewidth=0.9)

    for cyc in bundle.get("cycles", []):
        for chain in cyc.get("stable_chains", []):
            v = np.array(chain["vertices"])
            color = spec.manifold_colors.get("stable", "black")
            ax.plot(v[:, 0], v[:, 1], color=color, linewidth=0.7)
        pts = np.array(cyc["points"])
        ax.plot(pts[:, 0], pts[:, 1], "^", color=CYCLE_COLOR, markersize=8)

    for name, xy in (bundle.get("fixed_points") or {}).items():
        ax.plot(*xy, "o", color="black", markersize=4)
        ax.annotate(name, xy, textcoords="offset points", xytext=(4, 4), fontsize=9)

    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_aspect("equal", adjustable="datalim")


def render_portrait(bundle_json: str | Path, spec: FigureSpec) -> Path:
    """Phase portrait from one bundle: cloud, manifolds, fixed points, cycles."""
    with open(bundle_json, encoding="utf-8") as fh:
        bundle = json.load(fh)
    fig, ax = plt.subplots(figsize=spec.figsize)
    _paint_portrait(ax, bundle, spec)
    return _finish(fig, ax, spec)


def render_portrait_grid(bundle_jsons: list[str | Path], spec: FigureSpec) -> Path:
    """One row of portraits sharing axes, for side-by-side comparisons."""
    n = len(bundle_jsons)
    fig, axes = plt.subplots(
        1, n, figsize=(spec.figsize[0] * n, spec.figsize[1]), sharex=True, sharey=True
    )
    for ax, path in zip(np.atleast_1d(axes), bundle_jsons):
        with open(path, encoding="utf-8") as fh:
            _paint_portrait(ax, json.load(fh), spec)
    if spec.title:
        fig.suptitle(spec.title)
    if spec.xlim:
        np.atleast_1d(axes)[0].set_xlim(*spec.xlim)
    if spec.ylim:
        np.atleast_1d(axes)[0].set_ylim(*spec.ylim)
    out = Path(spec.out)
    fig.savefig(out, dpi=spec.dpi, metadata={"Software": None}, facecolor="white")
    plt.close(fig)
    return out
