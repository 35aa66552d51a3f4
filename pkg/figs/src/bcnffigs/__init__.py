"""Figure rendering for bcnflab file outputs."""
from .render import (
    DEFAULT_MANIFOLD_COLORS,
    DEFAULT_REGION_COLORS,
    FigureSpec,
    SchemaError,
    render_portrait,
    render_portrait_grid,
    render_slice,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_MANIFOLD_COLORS",
    "DEFAULT_REGION_COLORS",
    "FigureSpec",
    "SchemaError",
    "render_portrait",
    "render_portrait_grid",
    "render_slice",
]
