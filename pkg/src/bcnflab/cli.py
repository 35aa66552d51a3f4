"""Command-line front end and the package's on-disk formats.

Subcommands cover single-point classification, parameter-slice sweeps,
portrait bundles, boundary-curve traces, periodic-orbit lookup and the
self-test battery.  This module is the only place that writes files: slices
and traces go to CSV, portraits and point reports to JSON.

Every subcommand accepts ``--config FILE`` holding ``key = value`` lines
(UTF-8, ``#`` comments) whose keys match the long flag names; values given
on the command line win over the file.  Grid work can be spread over
processes with ``--jobs``; the output bytes do not depend on the worker
count because rows are formatted and written in grid order by the parent.

CSV cells use 17 significant digits, JSON numbers the shortest digit string
that parses back to the same double; both round-trip exactly.
"""
from __future__ import annotations

import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click
import numpy as np

from .bifurcation import find_cycle, cycle_stable_manifolds, trace_ht_curve
from .core import Params, fixed_points
from .errors import BcnfError
from .manifolds import (
    attractor_cloud,
    grow_manifold,
    special_points,
    trapping_region,
)
from .paramspace import chaos_indices, classify_region, phi, region_code
from .verify import run_verify

__all__ = [
    "SWEEP_HEADER",
    "TRACE_HEADER",
    "sweep_rows",
    "write_sweep_csv",
    "trace_to_rows",
    "write_trace_csv",
    "build_portrait",
    "classification_record",
    "main",
]

SWEEP_HEADER = "tau_L,tau_R,region_code,rn_index,phi,phi_g,J1,J2,sum_stable,thm1,thm2"
TRACE_HEADER = "tau_L,tau_R_star,residual,iterations,depth"


# ---------------------------------------------------------------------------
# formatting and config plumbing


def _fmt(x: float | None) -> str:
    """One CSV cell: 17 significant digits, empty for missing."""
    if x is None:
        return ""
    return format(float(x), ".17g")


def _flag(v: bool) -> str:
    return "true" if v else "false"


def _write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise click.ClickException(f"cannot write {path}: {exc}") from exc


def _emit(out: str | None, text: str) -> None:
    if out is None:
        click.echo(text)
    else:
        _write_text(out, text if text.endswith("\n") else text + "\n")


def _config_callback(ctx: click.Context, param: click.Parameter, value: str | None):
    """Load ``key = value`` lines into the context default map.

    Runs eagerly so the file's values act as defaults for every other
    option of the command; options typed on the command line still win.
    """
    if value is None:
        return None
    try:
        text = Path(value).read_text(encoding="utf-8")
    except OSError as exc:
        raise click.BadParameter(f"cannot read {value}: {exc}", ctx=ctx, param=param)
    loaded: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise click.BadParameter(
                f"{value}:{lineno}: expected 'key = value', got {raw.strip()!r}",
                ctx=ctx,
                param=param,
            )
        key, val = line.split("=", 1)
        loaded[key.strip().replace("-", "_")] = val.strip()
    ctx.default_map = {**loaded, **(ctx.default_map or {})}
    return value


def _config_option(fn):
    return click.option(
        "--config",
        type=click.Path(exists=False, dir_okay=False),
        default=None,
        is_eager=True,
        expose_value=False,
        callback=_config_callback,
        help="File of key = value lines supplying defaults for the other flags.",
    )(fn)


def _point_options(required: bool):
    def deco(fn):
        for name in ("--delta-r", "--tau-r", "--delta-l", "--tau-l"):
            fn = click.option(name, type=float, required=required, default=None)(fn)
        return fn

    return deco


def _default_jobs() -> int:
    return os.cpu_count() or 1


def _json_ready(obj):
    """Recursively convert numpy containers to plain Python for JSON."""
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _json_ready(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _dump_json(doc: dict) -> str:
    return json.dumps(_json_ready(doc), indent=None, separators=(",", ":")) + "\n"


# ---------------------------------------------------------------------------
# classify


def classification_record(params: Params, n_max: int = 12) -> dict:
    """Everything the classifier and the index formulas say about one point.

    Quantities that are undefined at the point (indices outside the saddle
    region, phi where an eigenvalue pair is complex) come back as None.
    """
    rc = classify_region(params, n_max)
    rec: dict = {
        "params": {
            "tau_L": params.tau_L,
            "delta_L": params.delta_L,
            "tau_R": params.tau_R,
            "delta_R": params.delta_R,
        },
        "region_code": region_code(rc),
        "in_Phi": rc.in_Phi,
        "in_Phi_BYG": rc.in_Phi_BYG,
        "rn_index": rc.rn_index,
        "phi": None,
        "phi_g": None,
        "J1": None,
        "J2": None,
        "sum_stable": None,
        "thm1_applies": False,
        "thm2_applies": False,
    }
    if rc.phi_values:
        rec["phi"] = None if math.isinf(rc.phi_values[0]) else rc.phi_values[0]
        if len(rc.phi_values) > 1 and not math.isinf(rc.phi_values[1]):
            rec["phi_g"] = rc.phi_values[1]
    else:
        try:
            rec["phi"] = phi(params)
        except (BcnfError, OverflowError):
            pass
    if rc.in_Phi:
        idx = chaos_indices(params)
        rec.update(
            J1=idx.J1,
            J2=idx.J2,
            sum_stable=idx.sum_stable,
            thm1_applies=idx.thm1_applies,
            thm2_applies=idx.thm2_applies,
        )
    return rec


# ---------------------------------------------------------------------------
# sweep


def _sweep_line(delta_L: float, delta_R: float, tau_L: float, tau_R: float, n_max: int) -> str:
    rec = classification_record(Params(tau_L, delta_L, tau_R, delta_R), n_max)
    cells = [
        _fmt(tau_L),
        _fmt(tau_R),
        rec["region_code"],
        "" if rec["rn_index"] is None else str(rec["rn_index"]),
        _fmt(rec["phi"]),
        _fmt(rec["phi_g"]),
        _fmt(rec["J1"]),
        _fmt(rec["J2"]),
        _fmt(rec["sum_stable"]),
        _flag(rec["thm1_applies"]),
        _flag(rec["thm2_applies"]),
    ]
    return ",".join(cells)


def _sweep_row_batch(args: tuple) -> list[str]:
    delta_L, delta_R, tau_L, tau_R_values, n_max = args
    return [_sweep_line(delta_L, delta_R, tau_L, tr, n_max) for tr in tau_R_values]


def sweep_rows(
    delta_L: float,
    delta_R: float,
    tau_L_values,
    tau_R_values,
    *,
    n_max: int = 12,
    jobs: int = 1,
) -> list[str]:
    """Formatted CSV lines for the full grid, row-major over tau_L then tau_R.

    The grid cells are independent, so any positive ``jobs`` produces the
    same lines in the same order.
    """
    tau_R_values = [float(t) for t in tau_R_values]
    batches = [(delta_L, delta_R, float(tl), tau_R_values, n_max) for tl in tau_L_values]
    if jobs > 1 and len(batches) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_sweep_row_batch, batches, chunksize=4))
    else:
        chunks = [_sweep_row_batch(b) for b in batches]
    return [line for chunk in chunks for line in chunk]


def write_sweep_csv(path: str, lines: list[str]) -> None:
    _write_text(path, "\n".join([SWEEP_HEADER, *lines]) + "\n")


# ---------------------------------------------------------------------------
# boundary-curve trace


def trace_to_rows(trace) -> list[str]:
    """CSV lines for a traced curve; unbracketed rows keep their grid point
    but leave the located value and residual empty."""
    lines = []
    for row in trace.rows:
        lines.append(
            ",".join(
                [
                    _fmt(row.tau_L),
                    _fmt(row.tau_R_star),
                    _fmt(row.residual),
                    str(row.iterations),
                    str(trace.depth_backward),
                ]
            )
        )
    return lines


def write_trace_csv(path: str, lines: list[str]) -> None:
    _write_text(path, "\n".join([TRACE_HEADER, *lines]) + "\n")


# ---------------------------------------------------------------------------
# portrait bundle


def _point_list(p) -> list[float]:
    return [float(p[0]), float(p[1])]


def build_portrait(
    params: Params,
    *,
    stable_depth: int = 8,
    unstable_depth: int = 12,
    transient: int = 1000,
    samples: int = 100_000,
    include_attractor: bool = True,
    cycle_words: tuple[str, ...] = (),
    cycle_stable_depth: int = 0,
) -> dict:
    """One self-consistent JSON document describing the phase portrait.

    The bundle always carries the fixed and landmark points and the two
    manifolds of the right fixed point.  The trapping triangle and the
    attractor need the positive-phi region; outside it those entries are
    null rather than wrong.  Requested cycle words that have no admissible
    orbit at this point are silently skipped.
    """

    def stage(label: str, fn):
        try:
            return fn()
        except BcnfError as exc:
            raise click.ClickException(f"portrait stage {label!r} failed: {exc}") from exc

    fp = stage("fixed-points", lambda: fixed_points(params))
    sp = stage("special-points", lambda: special_points(params))
    byg = phi(params) > 0.0

    doc: dict = {
        "params": {
            "tau_L": params.tau_L,
            "delta_L": params.delta_L,
            "tau_R": params.tau_R,
            "delta_R": params.delta_R,
        },
        "fixed_points": {"X": _point_list(fp.X), "Y": _point_list(fp.Y)},
        "special_points": {
            name: (None if getattr(sp, name) is None else _point_list(getattr(sp, name)))
            for name in (
                "D", "V", "U", "B", "T", "W", "Z",
                "f_D", "f2_D", "f_U", "f_B", "f_V", "finv_V", "f_T", "f2_T",
            )
        },
        "omega": None,
        "f_omega": None,
        "manifolds": [],
        "attractor": None,
        "cycles": [],
    }

    if byg:
        trap = stage("trapping-region", lambda: trapping_region(params, sp))
        doc["omega"] = trap.omega.vertices.tolist()
        doc["f_omega"] = trap.f_omega.vertices.tolist()

    for kind, depth in (("stable", stable_depth), ("unstable", unstable_depth)):
        approx = stage(
            f"{kind}-manifold",
            lambda kind=kind, depth=depth: grow_manifold(
                params, kind, "X", depth, escape_radius=1e9
            ),
        )
        doc["manifolds"].append(
            {
                "kind": approx.kind,
                "base": approx.base,
                "branch": approx.branch,
                "depth": approx.depth,
                "vertices": approx.polyline.vertices.tolist(),
            }
        )

    if include_attractor and byg:
        cloud = stage(
            "attractor",
            lambda: attractor_cloud(params, transient=transient, samples=samples),
        )
        doc["attractor"] = {
            "points": cloud.points.tolist(),
            "labels": cloud.labels.tolist(),
            "n_components": cloud.n_components,
            "meta": dict(cloud.meta),
        }

    for word in cycle_words:
        try:
            cyc = find_cycle(params, word)
        except BcnfError:
            continue
        entry = {
            "word": cyc.word,
            "points": cyc.points.tolist(),
            "multipliers": [[mu.real, mu.imag] for mu in cyc.multipliers],
            "saddle": cyc.saddle,
            "stable_chains": [],
        }
        if cycle_stable_depth > 0 and cyc.saddle:
            chains = stage(
                f"cycle-{word}-stable",
                lambda cyc=cyc: cycle_stable_manifolds(params, cyc, cycle_stable_depth),
            )
            entry["stable_chains"] = [
                {"branch": ch.branch, "vertices": ch.polyline.vertices.tolist()}
                for ch in chains
            ]
        doc["cycles"].append(entry)

    return doc


# ---------------------------------------------------------------------------
# command definitions


@click.group()
def main() -> None:
    """Numerical laboratory for a two-piece piecewise-linear planar map."""


@main.command()
@_config_option
@_point_options(required=True)
@click.option("--n-max", type=int, default=12, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def classify(tau_l, delta_l, tau_r, delta_r, n_max, out) -> None:
    """Classify one parameter point and print its indices as JSON."""
    rec = classification_record(Params(tau_l, delta_l, tau_r, delta_r), n_max)
    _emit(out, _dump_json(rec).rstrip("\n"))


@main.command()
@_config_option
@click.option("--delta-l", type=float, required=True)
@click.option("--delta-r", type=float, required=True)
@click.option("--tau-l-min", type=float, required=True)
@click.option("--tau-l-max", type=float, required=True)
@click.option("--tau-l-steps", type=int, required=True)
@click.option("--tau-r-min", type=float, required=True)
@click.option("--tau-r-max", type=float, required=True)
@click.option("--tau-r-steps", type=int, required=True)
@click.option("--n-max", type=int, default=12, show_default=True)
@click.option("--jobs", type=int, default=_default_jobs, help="Worker processes.")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def sweep(
    delta_l, delta_r,
    tau_l_min, tau_l_max, tau_l_steps,
    tau_r_min, tau_r_max, tau_r_steps,
    n_max, jobs, out,
) -> None:
    """Classify a (tau_L, tau_R) grid at fixed deltas into a CSV table."""
    if tau_l_steps < 1 or tau_r_steps < 1:
        raise click.ClickException("grid steps must be >= 1")
    if tau_l_max < tau_l_min or tau_r_max < tau_r_min:
        raise click.ClickException("grid ranges must be ordered (min <= max)")
    tls = np.linspace(tau_l_min, tau_l_max, tau_l_steps)
    trs = np.linspace(tau_r_min, tau_r_max, tau_r_steps)
    lines = sweep_rows(delta_l, delta_r, tls, trs, n_max=n_max, jobs=max(1, jobs))
    write_sweep_csv(out, lines)
    click.echo(f"wrote {len(lines)} rows to {out}")


@main.command()
@_config_option
@_point_options(required=True)
@click.option("--stable-depth", type=int, default=8, show_default=True)
@click.option("--unstable-depth", type=int, default=12, show_default=True)
@click.option("--transient", type=int, default=1000, show_default=True)
@click.option("--samples", type=int, default=100_000, show_default=True)
@click.option("--no-attractor", is_flag=True, default=False,
              help="Skip attractor sampling; its entry becomes null.")
@click.option("--cycle", "cycles", multiple=True,
              help="Itinerary word of a cycle to include; repeatable.")
@click.option("--cycle-stable-depth", type=int, default=0, show_default=True,
              help="Backward growth depth for included saddle cycles.")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def portrait(
    tau_l, delta_l, tau_r, delta_r,
    stable_depth, unstable_depth, transient, samples,
    no_attractor, cycles, cycle_stable_depth, out,
) -> None:
    """Write a JSON bundle with manifolds, landmarks, attractor and cycles."""
    doc = build_portrait(
        Params(tau_l, delta_l, tau_r, delta_r),
        stable_depth=stable_depth,
        unstable_depth=unstable_depth,
        transient=transient,
        samples=samples,
        include_attractor=not no_attractor,
        cycle_words=tuple(cycles),
        cycle_stable_depth=cycle_stable_depth,
    )
    _write_text(out, _dump_json(doc))
    click.echo(f"wrote portrait bundle to {out}")


@main.command("ht-trace")
@_config_option
@click.option("--delta-l", type=float, required=True)
@click.option("--delta-r", type=float, required=True)
@click.option("--tau-l-min", type=float, required=True)
@click.option("--tau-l-max", type=float, required=True)
@click.option("--tau-l-steps", type=int, required=True)
@click.option("--word", type=str, default="LRR", show_default=True)
@click.option("--scan-points", type=int, default=13, show_default=True)
@click.option("--bisect-tol", type=float, default=1e-4, show_default=True)
@click.option("--depth-forward", type=int, default=25, show_default=True)
@click.option("--depth-backward", type=int, default=15, show_default=True)
@click.option("--margin", type=float, default=1e-3, show_default=True)
@click.option("--jobs", type=int, default=_default_jobs, help="Worker processes.")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def ht_trace(
    delta_l, delta_r,
    tau_l_min, tau_l_max, tau_l_steps,
    word, scan_points, bisect_tol, depth_forward, depth_backward, margin,
    jobs, out,
) -> None:
    """Trace the tangency curve tau_R*(tau_L) over a tau_L grid into CSV."""
    if tau_l_steps < 0:
        raise click.ClickException("--tau-l-steps must be >= 0")
    if tau_l_steps == 0:
        write_trace_csv(out, [])
        click.echo(f"wrote 0 rows to {out}")
        return
    if tau_l_max < tau_l_min:
        raise click.ClickException("grid range must be ordered (min <= max)")
    tls = np.linspace(tau_l_min, tau_l_max, tau_l_steps)
    trace = trace_ht_curve(
        delta_l, delta_r, tls,
        word=word,
        scan_points=scan_points,
        bisect_tol=bisect_tol,
        depth_forward=depth_forward,
        depth_backward=depth_backward,
        margin=margin,
        jobs=max(1, jobs),
    )
    lines = trace_to_rows(trace)
    write_trace_csv(out, lines)
    click.echo(f"wrote {len(lines)} rows to {out}")


@main.command()
@_config_option
@_point_options(required=False)
@click.option("--random-n", type=int, default=500, show_default=True,
              help="Sample count for the randomized checks.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--corrupt-tolerances", is_flag=True, default=False,
              help="Self-test mode: make every check fail.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def verify(ctx, tau_l, delta_l, tau_r, delta_r, random_n, seed, corrupt_tolerances, out) -> None:
    """Run the self-test battery; exit status 1 when any check fails."""
    given = [v is not None for v in (tau_l, delta_l, tau_r, delta_r)]
    if any(given) and not all(given):
        raise click.ClickException(
            "give all four of --tau-l/--delta-l/--tau-r/--delta-r or none"
        )
    point = Params(tau_l, delta_l, tau_r, delta_r) if all(given) else None
    report = run_verify(point, n_random=random_n, seed=seed, corrupt=corrupt_tolerances)
    _emit(out, report.format())
    if not report.passed:
        ctx.exit(1)


@main.command()
@_config_option
@_point_options(required=True)
@click.option("--word", type=str, required=True, help="Itinerary word, e.g. LRR.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def cycle(tau_l, delta_l, tau_r, delta_r, word, out) -> None:
    """Locate the periodic orbit with the given itinerary and print it."""
    try:
        cyc = find_cycle(Params(tau_l, delta_l, tau_r, delta_r), word)
    except BcnfError as exc:
        raise click.ClickException(str(exc)) from exc
    doc = {
        "word": cyc.word,
        "points": cyc.points.tolist(),
        "multipliers": [[mu.real, mu.imag] for mu in cyc.multipliers],
        "saddle": cyc.saddle,
    }
    _emit(out, _dump_json(doc).rstrip("\n"))


if __name__ == "__main__":
    main()
