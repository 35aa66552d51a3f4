"""Command line wrapper exposing the FigureSpec fields as flags."""
import json

import click

from .render import (
    FigureSpec,
    SchemaError,
    render_portrait,
    render_portrait_grid,
    render_slice,
)


def _pairs_to_dict(pairs: tuple[str, ...], what: str) -> dict[str, str]:
    out = {}
    for item in pairs:
        key, sep, value = item.partition("=")
        if not sep or not key or not value:
            raise click.ClickException(f"{what} must look like KEY=VALUE, got {item!r}")
        out[key] = value
    return out


def _style_options(fn):
    for opt in reversed(
        [
            click.option("--out", type=click.Path(dir_okay=False), required=True),
            click.option("--dpi", type=int, default=150, show_default=True),
            click.option(
                "--figsize", type=float, nargs=2, default=(6.0, 5.0), show_default=True
            ),
            click.option("--title", type=str, default=None),
            click.option("--xlim", type=float, nargs=2, default=None),
            click.option("--ylim", type=float, nargs=2, default=None),
        ]
    ):
        fn = opt(fn)
    return fn


def _build_spec(out, dpi, figsize, title, xlim, ylim, **extra) -> FigureSpec:
    spec = FigureSpec(
        out=out,
        dpi=dpi,
        figsize=tuple(figsize),
        title=title,
        xlim=tuple(xlim) if xlim else None,
        ylim=tuple(ylim) if ylim else None,
    )
    if extra.get("marker"):
        spec.marker = tuple(extra["marker"])
    if extra.get("region_color"):
        spec.region_colors.update(_pairs_to_dict(extra["region_color"], "--region-color"))
    if extra.get("manifold_color"):
        spec.manifold_colors.update(
            _pairs_to_dict(extra["manifold_color"], "--manifold-color")
        )
    return spec


@click.group()
def main():
    """Render bcnflab CSV and JSON outputs as PNG figures."""


@main.command("slice")
@click.argument("sweep_csv", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--trace",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="Optional crisis-curve CSV to overlay.",
)
@_style_options
@click.option("--marker", type=float, nargs=2, default=None,
              help="Draw a black square at this (tau_L, tau_R).")
@click.option("--region-color", multiple=True, help="CODE=COLOR override.")
def cmd_slice(sweep_csv, trace, marker, region_color, **style):
    """Paint a parameter-plane sweep with its overlays."""
    spec = _build_spec(**style, marker=marker, region_color=region_color)
    try:
        path = render_slice(sweep_csv, trace, spec)
    except SchemaError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(str(path))


@main.command("portrait")
@click.argument("bundles", type=click.Path(exists=True, dir_okay=False), nargs=-1,
                required=True)
@_style_options
@click.option("--manifold-color", multiple=True, help="KIND=COLOR override.")
def cmd_portrait(bundles, manifold_color, **style):
    """Draw one phase portrait per bundle, side by side when given several."""
    spec = _build_spec(**style, manifold_color=manifold_color)
    try:
        if len(bundles) == 1:
            path = render_portrait(bundles[0], spec)
        else:
            path = render_portrait_grid(list(bundles), spec)
    except (json.JSONDecodeError, KeyError, ValueError) as exc:
        raise click.ClickException(f"cannot render bundle: {exc}") from exc
    click.echo(str(path))
