"""Segments, polylines, polygons and slope cones for the piecewise-linear map.

Forward images of polylines gain a vertex wherever an edge crosses the
switching line x = 0; those vertices land on its image, the horizontal axis.
Backward images split on the horizontal axis instead and the inserted
vertices land on x = 0.  Slope cones are intervals of dy/dx slopes (or x/y
slopes for the inverted family) that the half-map Jacobians keep invariant
while expanding vector norms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np
from scipy.spatial import cKDTree

from .core import Params, Point, SIGMA_TOL, apply_inverse_many, apply_many
from .errors import DegenerateParameterError

__all__ = [
    "ANGLE_TOL",
    "Segment",
    "Polyline",
    "Polygon",
    "SlopeCone",
    "split_at_sigma",
    "map_polyline",
    "cone_step",
    "standard_cone",
    "inverted_cone",
    "expansion_certificate",
    "longest_piece_bound",
    "line_intersection",
    "segment_line_intersection",
    "points_to_segments_distance",
    "chain_edges",
    "clip_edges_to_box",
    "polyline_clearance",
]

# Interior vertices whose turning angle is below this are dropped after a
# polyline is mapped, except when they sit on x = 0 or y = 0, where a kink
# may legitimately have zero angle at one parameter point and open up under
# perturbation.
ANGLE_TOL = 1e-10

Direction = Literal["forward", "backward"]


@dataclass(frozen=True)
class Segment:
    a: Point
    b: Point

    def length(self) -> float:
        return math.hypot(self.b.x - self.a.x, self.b.y - self.a.y)

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b], dtype=float)


class Polyline:
    """An ordered chain of plane points with at least one edge."""

    __slots__ = ("vertices",)

    def __init__(self, vertices: np.ndarray | Iterable) -> None:
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 2:
            raise ValueError(f"polyline needs an (n >= 2, 2) array, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("polyline vertices must be finite")
        if np.any(np.all(v[1:] == v[:-1], axis=1)):
            raise ValueError("polyline has an exactly repeated consecutive vertex")
        self.vertices = v

    def __len__(self) -> int:
        return self.vertices.shape[0]

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices[:-1], self.vertices[1:]

    def length(self) -> float:
        return float(np.sum(np.linalg.norm(np.diff(self.vertices, axis=0), axis=1)))

    def reversed(self) -> "Polyline":
        return Polyline(self.vertices[::-1].copy())


class Polygon:
    """A simple closed polygon given by its vertex cycle."""

    __slots__ = ("vertices",)

    def __init__(self, vertices: np.ndarray | Iterable) -> None:
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise ValueError(f"polygon needs an (n >= 3, 2) array, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("polygon vertices must be finite")
        self.vertices = v

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices, np.roll(self.vertices, -1, axis=0)

    def diameter(self) -> float:
        v = self.vertices
        d2 = np.sum((v[:, None, :] - v[None, :, :]) ** 2, axis=-1)
        return float(np.sqrt(d2.max()))

    def contains(self, points: np.ndarray, slack: float = 0.0) -> np.ndarray:
        """Even-odd containment test, optionally dilated by ``slack``.

        With a positive slack, points within that distance of the boundary
        count as inside; this is how every containment check in the package
        absorbs floating-point wobble on polygon edges.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        a, b = self.edges()
        px = pts[:, 0][:, None]
        py = pts[:, 1][:, None]
        ya, yb = a[None, :, 1], b[None, :, 1]
        xa, xb = a[None, :, 0], b[None, :, 0]
        straddle = (ya > py) != (yb > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            xcross = xa + (py - ya) * (xb - xa) / (yb - ya)
        hit = straddle & (px < xcross)
        inside = np.sum(hit, axis=1) % 2 == 1
        if slack > 0.0:
            near = points_to_segments_distance(pts, a, b) <= slack
            inside = inside | near
        return inside


@dataclass(frozen=True)
class SlopeCone:
    """An invariant slope interval with a certified expansion factor.

    orientation "standard" measures vectors t*(1, m) by their dy/dx slope m;
    orientation "inverted" measures t*(m, 1) by the x/y slope, which is the
    natural chart for the inverse map whose images concentrate near x = 0.
    """

    orientation: Literal["standard", "inverted"]
    K: tuple[float, float]
    expansion: float

    def __post_init__(self) -> None:
        lo, hi = self.K
        if not (lo < hi):
            raise ValueError(f"cone interval must have lo < hi, got {self.K}")


def split_at_sigma(segment: Segment, tol: float = SIGMA_TOL) -> list[Segment]:
    """Cut a segment at x = 0 if it strictly changes side.

    Endpoints within ``tol`` of the switching line count as on it, so no cut
    happens and downstream code treats the whole segment as one piece.
    """
    xa, xb = segment.a.x, segment.b.x
    if not (xa * xb < 0.0 and abs(xa) > tol and abs(xb) > tol):
        return [segment]
    t = xa / (xa - xb)
    mid = Point(0.0, segment.a.y + t * (segment.b.y - segment.a.y))
    return [Segment(segment.a, mid), Segment(mid, segment.b)]


def _insert_zero_crossings(v: np.ndarray, axis: int, tol: float) -> np.ndarray:
    c0 = v[:-1, axis]
    c1 = v[1:, axis]
    mask = (c0 * c1 < 0.0) & (np.abs(c0) > tol) & (np.abs(c1) > tol)
    if not mask.any():
        return v
    idx = np.nonzero(mask)[0]
    t = c0[idx] / (c0[idx] - c1[idx])
    pts = v[idx] + t[:, None] * (v[idx + 1] - v[idx])
    pts[:, axis] = 0.0
    return np.insert(v, idx + 1, pts, axis=0)


def _prune_collinear(v: np.ndarray, tol: float = SIGMA_TOL) -> np.ndarray:
    if v.shape[0] <= 2:
        return v
    u = v[1:-1] - v[:-2]
    w = v[2:] - v[1:-1]
    cross = np.abs(u[:, 0] * w[:, 1] - u[:, 1] * w[:, 0])
    dot = u[:, 0] * w[:, 0] + u[:, 1] * w[:, 1]
    scale = np.linalg.norm(u, axis=1) * np.linalg.norm(w, axis=1)
    straight = (cross <= ANGLE_TOL * scale) & (dot >= 0.0)
    on_lines = (np.abs(v[1:-1, 0]) <= tol) | (np.abs(v[1:-1, 1]) <= tol)
    keep = np.ones(v.shape[0], dtype=bool)
    keep[1:-1] = ~straight | on_lines
    v = v[keep]
    # exact consecutive duplicates can survive the angle test when they sit
    # on one of the kept lines; drop them so Polyline stays valid
    dup = np.all(v[1:] == v[:-1], axis=1)
    if dup.any():
        keep = np.ones(v.shape[0], dtype=bool)
        keep[1:][dup] = False
        v = v[keep]
    return v


def map_polyline(
    params: Params,
    polyline: Polyline,
    direction: Direction = "forward",
    *,
    prune: bool = True,
) -> Polyline:
    """Image of a polyline under one forward or backward step.

    Edges strictly crossing the relevant line gain a vertex there first, so
    every edge of the split chain lies in one half-plane and maps affinely;
    the inserted vertices land exactly on the image of the line they were cut
    on.  Interior vertices that come out collinear are pruned, except on the
    two distinguished lines.
    """
    if direction == "forward":
        split = _insert_zero_crossings(polyline.vertices, axis=0, tol=SIGMA_TOL)
        out = apply_many(params, split)
    elif direction == "backward":
        split = _insert_zero_crossings(polyline.vertices, axis=1, tol=SIGMA_TOL)
        out = apply_inverse_many(params, split)
    else:
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")
    if prune:
        out = _prune_collinear(out)
    return Polyline(out)


def cone_step(params: Params, side: Literal["L", "R"], m: float, *, inverted: bool = False) -> float:
    """Slope of the image of a cone vector under one half-map Jacobian.

    Standard cones: (1, m) maps to slope -delta/(tau + m).  Inverted cones
    live in the x/y chart, where the inverse Jacobian acts on (m, 1) with
    slope map -1/(tau + delta*m); both maps are increasing away from their
    pole, which is what makes endpoint checks sufficient for invariance.
    """
    tau, delta = params.side(side)
    if inverted:
        if delta == 0.0:
            raise DegenerateParameterError("inverted cone step undefined for delta = 0")
        return -1.0 / (tau + delta * m)
    return -delta / (tau + m)


def _half_eigs(params: Params):
    from .core import eigen_pair

    return eigen_pair(params.tau_L, params.delta_L), eigen_pair(params.tau_R, params.delta_R)


def standard_cone(params: Params) -> SlopeCone:
    """The forward-invariant slope interval with its certified expansion.

    The interval runs from the left unstable eigendirection slope to the
    right one; the left piece expands by at least lambda_L^u on it, the right
    piece by at least min(|lambda_R^u|, (|lambda_R^u| + 1)/sqrt(2)).
    """
    eL, eR = _half_eigs(params)
    c_left = eL.lambda_u
    a = abs(eR.lambda_u)
    c_right = min(a, (a + 1.0) / math.sqrt(2.0))
    return SlopeCone(
        orientation="standard",
        K=(-eL.lambda_s, abs(eR.lambda_s)),
        expansion=min(c_left, c_right),
    )


def inverted_cone(params: Params) -> SlopeCone:
    """The backward-invariant x/y-slope interval with its expansion factor."""
    eL, eR = _half_eigs(params)
    s = abs(eL.lambda_s)
    c_left = min(1.0 / s, (1.0 + s) / (math.sqrt(2.0) * s))
    s = abs(eR.lambda_s)
    c_right = min(1.0 / s, (1.0 + s) / (math.sqrt(2.0) * s))
    return SlopeCone(
        orientation="inverted",
        K=(-1.0 / eL.lambda_u, 1.0 / abs(eR.lambda_u)),
        expansion=min(c_left, c_right),
    )


def _effective_pair(params: Params, side: Literal["L", "R"], inverted: bool) -> tuple[float, float]:
    tau, delta = params.side(side)
    if not inverted:
        return tau, delta
    if delta == 0.0:
        raise DegenerateParameterError("inverted cone undefined for delta = 0")
    # reflecting coordinates turns the inverse Jacobian into the companion
    # matrix of (tau/delta, 1/delta), so one code path covers both families
    return tau / delta, 1.0 / delta


def expansion_certificate(
    params: Params,
    side: Literal["L", "R"],
    cone: SlopeCone,
    c: float,
    *,
    slack: float = 1e-12,
) -> bool:
    """Check that one half-map keeps the cone invariant and expands by c.

    Invariance is an endpoint check (the slope map is monotone between its
    poles).  Expansion tests H(m) = |M(1,m)|^2 - c^2*(1 + m^2) >= 0: for
    c > 1 the quadratic is concave so endpoints suffice; otherwise its
    interior minimum is evaluated directly.  ``slack`` absorbs roundoff at
    endpoints where H vanishes identically.
    """
    tau, delta = _effective_pair(params, side, cone.orientation == "inverted")
    if delta <= 0.0:
        raise ValueError("certificate assumes positive determinant")
    lo, hi = cone.K
    if lo <= -tau <= hi:
        return False  # pole inside the interval: slope map not defined on all of K
    inv_slack = slack * max(1.0, abs(lo), abs(hi))
    g_lo = -delta / (tau + lo)
    g_hi = -delta / (tau + hi)
    if not (lo - inv_slack <= g_lo and g_hi <= hi + inv_slack and g_lo <= g_hi + inv_slack):
        return False

    def h(m: float) -> float:
        return (tau + m) ** 2 + delta * delta - c * c * (1.0 + m * m)

    h_slack = slack * max(1.0, tau * tau + delta * delta + c * c)
    if h(lo) < -h_slack or h(hi) < -h_slack:
        return False
    if c <= 1.0:
        # parabola opens upward (or is linear): also check its vertex
        lead = 1.0 - c * c
        if lead > 0.0:
            m_star = -tau / lead
            if lo < m_star < hi and h(m_star) < -h_slack:
                return False
    return True


def longest_piece_bound(c_L: float, c_R: float) -> float:
    """Guaranteed growth factor for the longer image piece of a cut segment."""
    if c_L <= 0.0 or c_R <= 0.0:
        raise ValueError("expansion factors must be positive")
    return c_L * c_R / (c_L + c_R)


def line_intersection(p1: Point, slope1: float, p2: Point, slope2: float) -> Point:
    """Intersection of two non-vertical lines given by point and slope."""
    if slope1 == slope2:
        raise ValueError("lines are parallel")
    x = (p2.y - p1.y + slope1 * p1.x - slope2 * p2.x) / (slope1 - slope2)
    return Point(x, p1.y + slope1 * (x - p1.x))


def segment_line_intersection(seg: Segment, p: Point, slope: float) -> Point | None:
    """Meet of a segment with a non-vertical line, or None if they miss."""
    dx = seg.b.x - seg.a.x
    dy = seg.b.y - seg.a.y
    denom = dy - slope * dx
    if denom == 0.0:
        return None
    t = (p.y + slope * (seg.a.x - p.x) - seg.a.y) / denom
    if t < 0.0 or t > 1.0:
        return None
    return Point(seg.a.x + t * dx, seg.a.y + t * dy)


def points_to_segments_distance(
    points: np.ndarray, seg_a: np.ndarray, seg_b: np.ndarray, chunk: int = 512
) -> np.ndarray:
    """Distance from each point to the nearest of the given segments."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    d = seg_b - seg_a
    dd = np.einsum("ij,ij->i", d, d)
    dd[dd == 0.0] = 1.0  # degenerate segments behave as their endpoint
    out = np.empty(pts.shape[0])
    for lo in range(0, pts.shape[0], chunk):
        p = pts[lo : lo + chunk]
        w = p[:, None, :] - seg_a[None, :, :]
        t = np.clip(np.einsum("pij,ij->pi", w, d) / dd[None, :], 0.0, 1.0)
        proj = seg_a[None, :, :] + t[:, :, None] * d[None, :, :]
        dist = np.linalg.norm(p[:, None, :] - proj, axis=2)
        out[lo : lo + chunk] = dist.min(axis=1)
    return out


def _subdivide(a: np.ndarray, b: np.ndarray, max_len: float) -> tuple[np.ndarray, np.ndarray]:
    lens = np.linalg.norm(b - a, axis=1)
    k = np.maximum(1, np.ceil(lens / max_len).astype(int))
    total = int(k.sum())
    idx = np.repeat(np.arange(a.shape[0]), k)
    offsets = np.arange(total) - np.repeat(np.cumsum(k) - k, k)
    t0 = offsets / k[idx]
    t1 = (offsets + 1) / k[idx]
    dv = b - a
    return a[idx] + t0[:, None] * dv[idx], a[idx] + t1[:, None] * dv[idx]


def _cross_z(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]


def _point_to_segment_rowwise(p: np.ndarray, s0: np.ndarray, s1: np.ndarray) -> np.ndarray:
    d = s1 - s0
    dd = np.einsum("ij,ij->i", d, d)
    dd = np.where(dd == 0.0, 1.0, dd)
    t = np.clip(np.einsum("ij,ij->i", p - s0, d) / dd, 0.0, 1.0)
    return np.linalg.norm(p - (s0 + t[:, None] * d), axis=1)


def chain_edges(chains: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Stack the edges of several vertex chains into start/end arrays."""
    return (
        np.concatenate([np.asarray(c)[:-1] for c in chains]),
        np.concatenate([np.asarray(c)[1:] for c in chains]),
    )


def clip_edges_to_box(
    a: np.ndarray, b: np.ndarray, lo: np.ndarray, hi: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Liang-Barsky clip of many segments against one axis box."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = b - a
    u1 = np.zeros(a.shape[0])
    u2 = np.ones(a.shape[0])
    reject = np.zeros(a.shape[0], dtype=bool)
    for p, q in (
        (-d[:, 0], a[:, 0] - lo[0]),
        (d[:, 0], hi[0] - a[:, 0]),
        (-d[:, 1], a[:, 1] - lo[1]),
        (d[:, 1], hi[1] - a[:, 1]),
    ):
        with np.errstate(divide="ignore", invalid="ignore"):
            r = q / p
        neg = p < 0.0
        pos = p > 0.0
        u1 = np.where(neg, np.maximum(u1, r), u1)
        u2 = np.where(pos, np.minimum(u2, r), u2)
        reject |= (p == 0.0) & (q < 0.0)
    keep = ~reject & (u1 <= u2)
    da = a[keep] + u1[keep, None] * d[keep]
    db = a[keep] + u2[keep, None] * d[keep]
    return da, db


def polyline_clearance(
    a_edges: tuple[np.ndarray, np.ndarray],
    b_edges: tuple[np.ndarray, np.ndarray],
    resolution: float,
    *,
    first_crossing_only: bool = False,
) -> tuple[float, int]:
    """Minimal distance and proper-crossing count between two segment families.

    Long edges are subdivided to ``resolution`` and a KD-tree over the short
    pieces prunes the distance query.  Exact segment distances are evaluated
    for each piece's nearest opposite midpoint, which pins the reported
    minimum to within one resolution of the true minimum.  Crossing-capable
    pairs have midpoints within one resolution, so hashing midpoints on a
    grid of that pitch and testing neighbouring cells counts proper
    crossings exactly.  With ``first_crossing_only`` the enumeration stops
    at the first block containing a crossing and the count is then a lower
    bound, which is all a sign test needs.
    """
    a0, a1 = a_edges
    b0, b1 = b_edges
    sa0, sa1 = _subdivide(a0, a1, resolution)
    sb0, sb1 = _subdivide(b0, b1, resolution)
    mid_a = 0.5 * (sa0 + sa1)
    mid_b = 0.5 * (sb0 + sb1)
    tree = cKDTree(mid_b)
    nnd, nni = tree.query(mid_a, k=1, workers=-1)

    radius = 1.001 * resolution
    contact = np.nonzero(nnd <= radius)[0]
    crossings = _count_crossings(
        (sa0, sa1, mid_a, contact),
        (sb0, sb1, mid_b),
        radius,
        first_crossing_only,
    )
    if crossings > 0:
        return 0.0, crossings

    best = float(nnd.min())
    for lo in range(0, mid_a.shape[0], 2_000_000):
        sl = slice(lo, lo + 2_000_000)
        p0, p1 = sa0[sl], sa1[sl]
        jb = nni[sl]
        q0, q1 = sb0[jb], sb1[jb]
        d = _point_to_segment_rowwise(p0, q0, q1)
        np.minimum(d, _point_to_segment_rowwise(p1, q0, q1), out=d)
        np.minimum(d, _point_to_segment_rowwise(q0, p0, p1), out=d)
        np.minimum(d, _point_to_segment_rowwise(q1, p0, p1), out=d)
        if d.size:
            best = min(best, float(d.min()))
    return best, crossings


_CELL_OFFSET = 1 << 20
_CELL_STRIDE = 1 << 21


def _count_crossings(
    a_side: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray],
    b_side: tuple[np.ndarray, np.ndarray, np.ndarray],
    radius: float,
    first_only: bool,
) -> int:
    """Proper crossings among pairs with midpoints in adjacent grid cells."""
    sa0, sa1, mid_a, contact = a_side
    sb0, sb1, mid_b = b_side
    if contact.size == 0 or mid_b.shape[0] == 0:
        return 0
    inv = 1.0 / radius
    cb = np.floor(mid_b * inv).astype(np.int64)
    key_b = (cb[:, 0] + _CELL_OFFSET) * _CELL_STRIDE + (cb[:, 1] + _CELL_OFFSET)
    order_b = np.argsort(key_b, kind="stable")
    kb = key_b[order_b]
    total = 0
    for blo in range(0, contact.size, 100_000):
        idx = contact[blo : blo + 100_000]
        ca = np.floor(mid_a[idx] * inv).astype(np.int64)
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                ka = (ca[:, 0] + dx + _CELL_OFFSET) * _CELL_STRIDE + (
                    ca[:, 1] + dy + _CELL_OFFSET
                )
                left = np.searchsorted(kb, ka, "left")
                right = np.searchsorted(kb, ka, "right")
                counts = right - left
                nz = np.nonzero(counts)[0]
                if nz.size == 0:
                    continue
                cc = counts[nz]
                tot = int(cc.sum())
                ends = np.cumsum(cc)
                inner = np.arange(tot) - np.repeat(ends - cc, cc)
                ia = np.repeat(idx[nz], cc)
                jb = order_b[np.repeat(left[nz], cc) + inner]
                for plo in range(0, tot, 2_000_000):
                    sl = slice(plo, plo + 2_000_000)
                    p0, p1 = sa0[ia[sl]], sa1[ia[sl]]
                    q0, q1 = sb0[jb[sl]], sb1[jb[sl]]
                    da, db = p1 - p0, q1 - q0
                    hit = (_cross_z(db, p0 - q0) * _cross_z(db, p1 - q0) < 0.0) & (
                        _cross_z(da, q0 - p0) * _cross_z(da, q1 - p0) < 0.0
                    )
                    total += int(np.count_nonzero(hit))
        if first_only and total > 0:
            return total
    return total
