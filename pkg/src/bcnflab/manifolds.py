"""Invariant-set geometry: special points, trapping region, manifolds, attractor.

All constructions live on one parameter point with phi > 0.  The right
branch of the repelling fixed point's outgoing manifold kinks first at D;
the incoming manifold of the flipping saddle kinks first at V.  Those two
points, together with U and B, cut out a trapping triangle whose forward
image is a pentagon inside it, and the attractor is the closure of the
outgoing manifold of X inside that triangle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .core import (
    Params,
    Point,
    apply,
    apply_inverse,
    eigen,
    fixed_points,
    orbit,
)
from .errors import (
    EscapeError,
    OutsidePhiError,
    PointUndefinedError,
    VertexBudgetError,
)
from .geometry import (
    Polygon,
    Polyline,
    Segment,
    line_intersection,
    map_polyline,
    points_to_segments_distance,
    segment_line_intersection,
)
from .paramspace import in_phi, phi, phi_violations

__all__ = [
    "DEFAULT_VERTEX_CAP",
    "SpecialPoints",
    "TrapRegion",
    "ManifoldApprox",
    "AttractorApprox",
    "CoverageReport",
    "DeltaRegion",
    "special_points",
    "trapping_region",
    "grow_manifold",
    "iterate_polyline",
    "attractor_cloud",
    "coverage_gaps",
    "delta_region",
]

DEFAULT_VERTEX_CAP = 1_000_000


@dataclass(frozen=True)
class SpecialPoints:
    """Landmark points of the manifold skeleton, plus the images used later.

    Z is the meet of the incoming eigenline of X with the second outgoing
    manifold segment [T, f^2(T)]; it only exists once that segment reaches
    back across the eigenline, and is None otherwise.
    """

    D: Point
    V: Point
    U: Point
    B: Point
    T: Point
    W: Point
    Z: Point | None
    f_D: Point
    f2_D: Point
    f_U: Point
    f_B: Point
    f_V: Point
    finv_V: Point
    f_T: Point
    f2_T: Point


@dataclass(frozen=True)
class TrapRegion:
    omega: Polygon  # triangle D, f(D), B
    f_omega: Polygon  # pentagon D, f(D), f(U), f^2(D), f(B)


@dataclass(frozen=True)
class ManifoldApprox:
    kind: Literal["stable", "unstable"]
    base: str
    branch: str
    depth: int
    polyline: Polyline


@dataclass(frozen=True)
class AttractorApprox:
    points: np.ndarray  # (n, 2) collected post-transient samples
    labels: np.ndarray  # component label per point
    n_components: int
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CoverageReport:
    max_gap: float
    mean_gap: float
    grid_n: int
    n_cells: int


@dataclass(frozen=True)
class DeltaRegion:
    polygons: list[Polygon]  # forward images of the seed triangle, in order
    depth: int

    def contains(self, points: np.ndarray, slack: float = 0.0) -> np.ndarray:
        """Membership in the union, with the usual dilated-boundary slack."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        covered = np.zeros(pts.shape[0], dtype=bool)
        for poly in self.polygons:
            todo = ~covered
            if not todo.any():
                break
            sub = pts[todo]
            v = poly.vertices
            lo = v.min(axis=0) - slack
            hi = v.max(axis=0) + slack
            boxed = np.all((sub >= lo) & (sub <= hi), axis=1)
            if not boxed.any():
                continue
            hit = np.zeros(sub.shape[0], dtype=bool)
            hit[boxed] = poly.contains(sub[boxed], slack=slack)
            idx = np.nonzero(todo)[0]
            covered[idx[hit]] = True
        return covered


def _require_phi(params: Params, what: str) -> None:
    broken = phi_violations(params)
    if broken:
        raise OutsidePhiError(f"{what} needs the saddle region; violated: {'; '.join(broken)}")


def _require_byg(params: Params, what: str) -> None:
    if not (in_phi(params) and phi(params) > 0.0):
        raise OutsidePhiError(f"{what} needs phi > 0 inside the saddle region, got {params}")


def special_points(params: Params) -> SpecialPoints:
    """Closed-form landmarks of the manifold skeleton.

    D and V come from the first switching-line crossings of the respective
    eigenlines, U is where [D, f(D)] crosses x = 0, B closes the trapping
    triangle on the outgoing eigenline of Y, and T = f(W) starts the
    outgoing manifold of X on the horizontal axis.  Everything here only
    needs the saddle region itself; the trapping property of the triangle
    additionally needs phi > 0 and is checked in trapping_region.
    """
    _require_phi(params, "special points")
    fp = fixed_points(params)
    eL = eigen(params, "L")
    eR = eigen(params, "R")

    D = Point(1.0 / (1.0 - eL.lambda_s), 0.0)
    V = Point(0.0, -eR.lambda_u / (eR.lambda_u - 1.0))
    U = Point(
        0.0,
        -params.delta_R / ((eL.lambda_s - params.tau_R) * (1.0 - eL.lambda_s)),
    )
    f_D = apply(params, D)
    f2_D = apply(params, f_D)
    # B: outgoing eigenline of Y meets the line through f(D) parallel to the
    # incoming one
    B = line_intersection(fp.Y, eL.slope_u, f_D, eL.slope_s)
    f_B = apply(params, B)
    f_U = apply(params, U)
    f_V = apply(params, V)
    finv_V = apply_inverse(params, V)
    # W: outgoing eigenline of X meets x = 0; T = f(W) lands on y = 0
    W = Point(0.0, fp.X.y - eR.slope_u * fp.X.x)
    T = Point(W.y + 1.0, 0.0)
    f_T = apply(params, T)
    f2_T = apply(params, f_T)
    Z = segment_line_intersection(Segment(T, f2_T), fp.X, eR.slope_s)
    return SpecialPoints(
        D=D, V=V, U=U, B=B, T=T, W=W, Z=Z,
        f_D=f_D, f2_D=f2_D, f_U=f_U, f_B=f_B, f_V=f_V, finv_V=finv_V,
        f_T=f_T, f2_T=f2_T,
    )


def trapping_region(params: Params, sp: SpecialPoints | None = None) -> TrapRegion:
    """The forward-invariant triangle and its image pentagon."""
    _require_byg(params, "the trapping region")
    if sp is None:
        sp = special_points(params)
    omega = Polygon([sp.D, sp.f_D, sp.B])
    f_omega = Polygon([sp.D, sp.f_D, sp.f_U, sp.f2_D, sp.f_B])
    return TrapRegion(omega=omega, f_omega=f_omega)


def _join(*chunks: np.ndarray) -> np.ndarray:
    v = np.concatenate([np.atleast_2d(c) for c in chunks], axis=0)
    dup = np.all(v[1:] == v[:-1], axis=1)
    if dup.any():
        keep = np.ones(v.shape[0], dtype=bool)
        keep[1:][dup] = False
        v = v[keep]
    return v


def iterate_polyline(
    params: Params,
    start: Polyline,
    steps: int,
    direction: Literal["forward", "backward"],
    *,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
    escape_radius: float | None = None,
) -> list[Polyline]:
    """All iterates [start, f(start), ..., f^steps(start)] with guards.

    Raises VertexBudgetError if a pruned iterate still exceeds the cap and
    EscapeError if any vertex norm passes ``escape_radius``.
    """
    pieces = [start]
    for _ in range(steps):
        nxt = map_polyline(params, pieces[-1], direction)
        if len(nxt) > vertex_cap:
            raise VertexBudgetError(
                f"{len(nxt)} vertices exceed the cap of {vertex_cap}"
            )
        if escape_radius is not None:
            worst = float(np.max(np.abs(nxt.vertices)))
            if worst > escape_radius:
                raise EscapeError(f"manifold growth reached |coordinate| = {worst:.3g}")
        pieces.append(nxt)
    return pieces


def grow_manifold(
    params: Params,
    kind: Literal["stable", "unstable"],
    base: Literal["X", "Y"],
    depth: int,
    *,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
    escape_radius: float | None = None,
) -> ManifoldApprox:
    """Accumulated manifold polyline from the natural seed segment.

    unstable/X seeds [X, T]; successive images alternate branches, so the
    union of all iterates up to ``depth`` equals the last two joined through
    X.  unstable/Y seeds the fundamental domain [D, f(D)] of the right
    branch and the iterates chain head to tail.  stable/X seeds
    [f(V), f^-1(V)] on the incoming eigenline and grows backward; its
    iterates tile two interleaved arcs that meet the seed through [V, f(V)],
    which passes through X.
    """
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    sp = special_points(params)
    fp = fixed_points(params)
    if kind == "unstable" and base == "X":
        seed = Polyline([fp.X, sp.T])
        pieces = iterate_polyline(
            params, seed, depth, "forward",
            vertex_cap=vertex_cap, escape_radius=escape_radius,
        )
        if depth == 0:
            poly = seed
        else:
            poly = Polyline(_join(pieces[-2].vertices[::-1], pieces[-1].vertices))
    elif kind == "unstable" and base == "Y":
        seed = Polyline([sp.D, sp.f_D])
        pieces = iterate_polyline(
            params, seed, depth, "forward",
            vertex_cap=vertex_cap, escape_radius=escape_radius,
        )
        poly = Polyline(_join(*(p.vertices for p in pieces)))
    elif kind == "stable" and base == "X":
        seed = Polyline([sp.f_V, sp.finv_V])
        pieces = iterate_polyline(
            params, seed, depth, "backward",
            vertex_cap=vertex_cap, escape_radius=escape_radius,
        )
        if depth == 0:
            poly = seed
        else:
            evens = _join(*(pieces[i].vertices for i in range(0, depth + 1, 2)))
            odds = _join(*(pieces[i].vertices for i in range(1, depth + 1, 2)))
            poly = Polyline(_join(odds[::-1], np.array([fp.X]), evens))
    else:
        raise ValueError(f"no growth rule for kind={kind!r}, base={base!r}")
    return ManifoldApprox(kind=kind, base=base, branch="main", depth=depth, polyline=poly)


def _cluster_components(pts: np.ndarray, eps: float) -> tuple[np.ndarray, int]:
    """Connected components of the eps-neighbourhood graph, exactly.

    Points are bucketed on a grid with cell diagonal eps, so each occupied
    cell is one clique; cells at Chebyshev offset <= 2 merge when their point
    sets come within eps.  This reproduces single-linkage clustering at
    radius eps without enumerating the quadratically many close pairs.
    """
    n = pts.shape[0]
    h = eps / math.sqrt(2.0)
    keys = np.floor(pts / h).astype(np.int64)
    cell_xy, cell_of = np.unique(keys, axis=0, return_inverse=True)
    cell_of = cell_of.ravel()
    n_cells = cell_xy.shape[0]
    order = np.argsort(cell_of, kind="stable")
    bounds = np.searchsorted(cell_of[order], np.arange(n_cells + 1))
    members = [order[bounds[i] : bounds[i + 1]] for i in range(n_cells)]

    parent = np.arange(n_cells)

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    lookup = {(int(a), int(b)): i for i, (a, b) in enumerate(cell_xy)}
    eps2 = eps * eps
    offsets = [
        (0, 1), (0, 2),
        (1, -2), (1, -1), (1, 0), (1, 1), (1, 2),
        (2, -2), (2, -1), (2, 0), (2, 1), (2, 2),
    ]
    for i in range(n_cells):
        ax, ay = int(cell_xy[i, 0]), int(cell_xy[i, 1])
        for dx, dy in offsets:
            j = lookup.get((ax + dx, ay + dy))
            if j is None:
                continue
            ri, rj = find(i), find(j)
            if ri == rj:
                continue
            a = pts[members[i]]
            b = pts[members[j]]
            d2 = np.sum((a[:, None, :] - b[None, :, :]) ** 2, axis=-1)
            if d2.min() <= eps2:
                parent[ri] = rj
    roots = np.fromiter((find(int(c)) for c in cell_of), dtype=int, count=n)
    uniq_roots, labels = np.unique(roots, return_inverse=True)
    return labels, int(uniq_roots.shape[0])


def attractor_cloud(
    params: Params,
    *,
    transient: int = 1_000,
    samples: int = 100_000,
    cluster_eps: float | None = None,
    seed_offset: float = 1e-8,
    escape_radius: float = 1e9,
) -> AttractorApprox:
    """Orbit-sampled attractor with single-linkage component count.

    The orbit starts a tiny step from X along the outgoing eigendirection,
    runs ``transient`` unrecorded steps and then collects ``samples`` points.
    The default clustering radius is one percent of the trapping-triangle
    diameter.  The meta dict records how many samples fell outside the
    trapping triangle (with 1e-9 dilation); for phi > 0 this should be zero.
    """
    _require_byg(params, "attractor sampling")
    fp = fixed_points(params)
    eR = eigen(params, "R")
    trap = trapping_region(params)
    if cluster_eps is None:
        cluster_eps = 0.01 * trap.omega.diameter()
    norm = math.hypot(1.0, eR.slope_u)
    p0 = (fp.X.x + seed_offset / norm, fp.X.y + seed_offset * eR.slope_u / norm)
    o = orbit(params, p0, transient + samples, escape_radius=escape_radius)
    if o.diverged:
        raise EscapeError(f"attractor orbit diverged at {params}")
    pts = o.points[transient + 1 :]
    labels, n_comp = _cluster_components(pts, cluster_eps)
    outside = int(np.count_nonzero(~trap.omega.contains(pts, slack=1e-9)))
    return AttractorApprox(
        points=pts,
        labels=labels,
        n_components=n_comp,
        meta={
            "transient": transient,
            "samples": samples,
            "cluster_eps": cluster_eps,
            "seed_offset": seed_offset,
            "n_outside_trap": outside,
        },
    )


def coverage_gaps(
    chains: list[np.ndarray],
    region: Polygon,
    grid_n: int = 60,
) -> CoverageReport:
    """How far grid points of ``region`` sit from a family of polylines.

    The driving use is watching the incoming-manifold approximation fill the
    trapping triangle: the maximal gap must shrink as growth depth rises.
    """
    v = region.vertices
    lo = v.min(axis=0)
    hi = v.max(axis=0)
    xs = np.linspace(lo[0], hi[0], grid_n)
    ys = np.linspace(lo[1], hi[1], grid_n)
    gx, gy = np.meshgrid(xs, ys)
    grid = np.stack([gx.ravel(), gy.ravel()], axis=1)
    grid = grid[region.contains(grid)]
    if grid.shape[0] == 0:
        # a zero-area region has no interior; measure its vertices instead
        grid = np.unique(v, axis=0)
    seg_a = np.concatenate([c[:-1] for c in chains])
    seg_b = np.concatenate([c[1:] for c in chains])
    d = points_to_segments_distance(grid, seg_a, seg_b)
    return CoverageReport(
        max_gap=float(d.max()),
        mean_gap=float(d.mean()),
        grid_n=grid_n,
        n_cells=int(grid.shape[0]),
    )


def delta_region(
    params: Params,
    depth: int,
    *,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
) -> DeltaRegion:
    """Forward images of the triangle X, T, Z.

    The union over all iterates carries the attractor; Z must exist, which
    is exactly the phi(g) < 0 side of the first renormalisation boundary.
    """
    sp = special_points(params)
    if sp.Z is None:
        raise PointUndefinedError(
            "the seed triangle needs Z, which does not exist here (phi(g) >= 0)"
        )
    fp = fixed_points(params)
    tri = [fp.X, sp.T, sp.Z]
    polys = [Polygon(tri)]
    boundary = Polyline(np.array(tri + [fp.X], dtype=float))
    for _ in range(depth):
        boundary = map_polyline(params, boundary, "forward")
        if len(boundary) > vertex_cap:
            raise VertexBudgetError(f"{len(boundary)} boundary vertices exceed {vertex_cap}")
        polys.append(Polygon(boundary.vertices[:-1]))
    return DeltaRegion(polygons=polys, depth=depth)
