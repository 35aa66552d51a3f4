"""Periodic orbits, the homoclinic-tangency boundary and escape diagnostics.

A symbolic word over {L, R} pins down one affine composition of the two
half-maps, and its periodic point comes out of a 2x2 linear solve.  The
boundary where the unstable manifold of the main saddle first touches the
stable set of the period-three saddle cycle is located by bisecting, in the
trace parameter, the flag that says whether the two polyline families
cross.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from .core import SIGMA_TOL, Params, apply_many, jacobian
from .errors import (
    BcnfError,
    EscapeError,
    ItineraryMismatchError,
    PointUndefinedError,
    SingularCompositionError,
    VertexBudgetError,
)
from .geometry import Polyline, chain_edges, clip_edges_to_box, polyline_clearance
from .manifolds import DEFAULT_VERTEX_CAP, ManifoldApprox, grow_manifold
from .paramspace import TAU_R_FLOOR, phi

__all__ = [
    "PeriodicCycle",
    "HTSample",
    "HTCurveRow",
    "CurveTrace",
    "EscapeReport",
    "find_cycle",
    "cycle_stable_manifolds",
    "ht_distance",
    "trace_ht_curve",
    "escape_survey",
    "phi_zero_boundary",
]

# A periodic point this close to the switching line cannot anchor a local
# manifold segment of meaningful width.
MIN_SWITCH_CLEARANCE = 1e-9


@dataclass(frozen=True)
class PeriodicCycle:
    """A periodic orbit realised with one half-map piece per letter."""

    word: str
    points: np.ndarray  # (period, 2); points[i] lies in the half-plane of word[i]
    multipliers: tuple[complex, complex]  # eigenvalues of the composed Jacobian
    saddle: bool

    @property
    def period(self) -> int:
        return len(self.word)


@dataclass(frozen=True)
class HTSample:
    """One evaluation of the tangency detector."""

    params: Params
    distance: float  # clearance, negated when the families cross or escape
    crossings: int
    escaped: bool
    depth_forward: int
    depth_backward: int


@dataclass(frozen=True)
class HTCurveRow:
    tau_L: float
    tau_R_star: float | None  # None when no sign change exists on the scan range
    residual: float | None  # smallest separated-side clearance seen while bisecting
    iterations: int


@dataclass(frozen=True)
class CurveTrace:
    delta_L: float
    delta_R: float
    word: str
    bisect_tol: float
    depth_forward: int
    depth_backward: int
    rows: list[HTCurveRow] = field(default_factory=list)


@dataclass(frozen=True)
class EscapeReport:
    n_total: int
    n_escaped: int
    fraction: float
    steps: int
    radius: float


def _validate_word(word: str) -> None:
    if not word or any(ch not in "LR" for ch in word):
        raise ValueError(f"word must be a nonempty string over L and R, got {word!r}")


def _compose(params: Params, word: str) -> tuple[np.ndarray, np.ndarray]:
    """Matrix and offset of the affine map selected by ``word``.

    Letters act left to right: the first letter is applied first.
    """
    b = np.array([1.0, 0.0])
    M = np.eye(2)
    c = np.zeros(2)
    for letter in word:
        A = jacobian(params, letter)
        M = A @ M
        c = A @ c + b
    return M, c


def _eigvals_2x2(M: np.ndarray) -> tuple[complex, complex]:
    """Eigenvalues of a 2x2 matrix, largest magnitude first.

    Real pairs use the cancellation-free quadratic form and come back as
    plain floats inside the complex tuple.
    """
    t = float(M[0, 0] + M[1, 1])
    d = float(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])
    disc = t * t - 4.0 * d
    if disc < 0.0:
        root = complex(t / 2.0, math.sqrt(-disc) / 2.0)
        return root, root.conjugate()
    sq = math.sqrt(disc)
    if t == 0.0:
        big, small = sq / 2.0, -sq / 2.0
    else:
        q = 0.5 * (t + math.copysign(sq, t))
        big, small = q, (d / q if q != 0.0 else 0.0)
    if abs(small) > abs(big):
        big, small = small, big
    return complex(big), complex(small)


def find_cycle(params: Params, word: str) -> PeriodicCycle:
    """Periodic orbit whose itinerary spells ``word``.

    Solves (I - M) p = c for the point closed by the word's affine
    composition, then replays the word and checks that every point sits in
    the half-plane its letter claims.  Raises SingularCompositionError when
    the composition has eigenvalue one and ItineraryMismatchError when the
    algebraic solution does not realise the itinerary.
    """
    _validate_word(word)
    M, c = _compose(params, word)
    S = np.eye(2) - M
    det = S[0, 0] * S[1, 1] - S[0, 1] * S[1, 0]
    scale = 1.0 + float(np.max(np.abs(M)))
    if abs(det) <= 1e-12 * scale:
        raise SingularCompositionError(
            f"word {word!r} composes to a map with eigenvalue 1 at {params}"
        )
    p = np.linalg.solve(S, c)
    b = np.array([1.0, 0.0])
    pts = np.empty((len(word), 2))
    q = p
    for i, letter in enumerate(word):
        pts[i] = q
        x = q[0]
        if letter == "L" and x > SIGMA_TOL:
            raise ItineraryMismatchError(
                f"point {i} of word {word!r} has x = {x:.6g}, not in the left half-plane"
            )
        if letter == "R" and x < -SIGMA_TOL:
            raise ItineraryMismatchError(
                f"point {i} of word {word!r} has x = {x:.6g}, not in the right half-plane"
            )
        q = jacobian(params, letter) @ q + b
    mu_big, mu_small = _eigvals_2x2(M)
    saddle = (
        mu_big.imag == 0.0
        and mu_small.imag == 0.0
        and abs(mu_big) > 1.0
        and abs(mu_small) < 1.0
    )
    return PeriodicCycle(word=word, points=pts, multipliers=(mu_big, mu_small), saddle=saddle)


def _stable_direction(M: np.ndarray, mu: float) -> np.ndarray:
    """Unit eigenvector of a 2x2 matrix for a real eigenvalue."""
    v1 = np.array([M[0, 1], mu - M[0, 0]])
    v2 = np.array([mu - M[1, 1], M[1, 0]])
    v = v1 if np.hypot(*v1) >= np.hypot(*v2) else v2
    n = np.hypot(*v)
    if n == 0.0:
        raise SingularCompositionError("composed Jacobian is a multiple of the identity")
    return v / n


def _forced_images_valid(params: Params, word: str, start: int, endpoints: np.ndarray) -> bool:
    """Whether both endpoints follow the rotated word for one full period.

    The half-maps agree on x = 0, so each closed half-plane may keep its
    boundary and segment validity reduces to endpoint validity.
    """
    b = np.array([1.0, 0.0])
    k = len(word)
    q = endpoints.copy()
    for i in range(k):
        letter = word[(start + i) % k]
        if letter == "L" and np.any(q[:, 0] > SIGMA_TOL):
            return False
        if letter == "R" and np.any(q[:, 0] < -SIGMA_TOL):
            return False
        q = q @ jacobian(params, letter).T + b
    return True


# Backward growth is carried out in fixed-point arithmetic with this many
# fractional bits.  Deep chains reach coordinates of order 1e10 and beyond,
# where double-precision edge splitting leaves absolute errors that the
# expansion along the chain then inflates past the scale of the geometry;
# integer arithmetic keeps every split exact at any excursion size.
_FIXED_SHIFT = 256
_FIXED_ONE = 1 << _FIXED_SHIFT


def _to_fixed(x: float) -> int:
    fr = Fraction(float(x))
    return (fr.numerator << _FIXED_SHIFT) // fr.denominator


def _fixed_scale(n: int, factor: Fraction) -> int:
    return (n * factor.numerator) // factor.denominator


def _grow_backward_exact(
    params: Params, seed: np.ndarray, depth: int, vertex_cap: int
) -> np.ndarray:
    """Backward orbit of a vertex chain, split exactly on the branch line.

    Vertices live on a 256-fractional-bit integer grid.  Each step cuts the
    chain where it strictly crosses y = 0, then applies the inverse branch
    picked by the sign of y; the one rounding per operation is far below any
    scale the dynamics can amplify back to relevance.
    """
    tau_L, delta_L = Fraction(params.tau_L), Fraction(params.delta_L)
    tau_R, delta_R = Fraction(params.tau_R), Fraction(params.delta_R)
    inv_dL, inv_dR = 1 / delta_L, 1 / delta_R

    def pre(v: tuple[int, int]) -> tuple[int, int]:
        x, y = v
        if y > 0:
            xp = -_fixed_scale(y, inv_dL)
            return xp, x - _fixed_scale(xp, tau_L) - _FIXED_ONE
        xp = -_fixed_scale(y, inv_dR)
        return xp, x - _fixed_scale(xp, tau_R) - _FIXED_ONE

    verts = [(_to_fixed(p[0]), _to_fixed(p[1])) for p in seed]
    for _ in range(depth):
        split = [verts[0]]
        for (x0, y0), (x1, y1) in zip(verts, verts[1:]):
            if (y0 > 0 > y1) or (y0 < 0 < y1):
                split.append((x0 + ((x1 - x0) * y0) // (y0 - y1), 0))
            split.append((x1, y1))
        if len(split) > vertex_cap:
            raise VertexBudgetError(
                f"backward chain needs {len(split)} vertices, cap is {vertex_cap}"
            )
        verts = [pre(v) for v in split]
    out = np.array(
        [[x / _FIXED_ONE, y / _FIXED_ONE] for x, y in verts], dtype=float
    )
    keep = np.ones(len(out), dtype=bool)
    keep[1:] = (np.diff(out, axis=0) != 0.0).any(axis=1)
    return out[keep]


def cycle_stable_manifolds(
    params: Params,
    cycle: PeriodicCycle,
    depth: int,
    *,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
) -> list[ManifoldApprox]:
    """Stable-set polylines of a saddle cycle, one per orbit point.

    Each point gets a seed segment along the stable eigendirection of its
    composed Jacobian, shrunk until a full period of forced images stays in
    the correct half-planes; the seed then grows under ``depth`` single
    backward steps in exact fixed-point arithmetic.  The deepest iterate of
    each seed is returned, relabelled by the orbit point it passes through,
    and nests all shallower iterates taken a multiple of the period earlier.
    """
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    if not cycle.saddle:
        raise PointUndefinedError(
            f"cycle {cycle.word!r} is not a saddle, multipliers {cycle.multipliers}"
        )
    k = cycle.period
    mu_s = cycle.multipliers[1].real
    clearance = float(np.min(np.abs(cycle.points[:, 0])))
    if clearance <= MIN_SWITCH_CLEARANCE:
        raise PointUndefinedError(
            f"cycle {cycle.word!r} touches the switching line, clearance {clearance:.3g}"
        )
    grown: list[tuple[int, Polyline]] = []
    for j in range(k):
        rotated = cycle.word[j:] + cycle.word[:j]
        M_j, _ = _compose(params, rotated)
        v = _stable_direction(M_j, mu_s)
        r = 0.45 * clearance / max(abs(v[0]), 1e-16)
        r = min(r, 0.45 * clearance)
        p = cycle.points[j]
        seed = None
        for _ in range(80):
            ends = np.array([p - r * v, p + r * v])
            if _forced_images_valid(params, cycle.word, j, ends):
                seed = ends
                break
            r *= 0.5
        if seed is None:
            raise PointUndefinedError(
                f"no valid stable seed at point {j} of cycle {cycle.word!r}"
            )
        chain = _grow_backward_exact(params, seed, depth, vertex_cap)
        grown.append(((j - depth) % k, Polyline(chain)))
    grown.sort(key=lambda item: item[0])
    return [
        ManifoldApprox(
            kind="stable",
            base=f"cycle-{cycle.word}",
            branch=str(idx),
            depth=depth,
            polyline=poly,
        )
        for idx, poly in grown
    ]


def ht_distance(
    params: Params,
    *,
    word: str = "LRR",
    depth_forward: int = 25,
    depth_backward: int = 15,
    resolution_factor: float = 0.02,
    bounding_radius: float = 1e3,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
) -> HTSample:
    """Signed clearance between W^u of the main saddle and W^s of a cycle.

    Positive means the families are disjoint at the grown depths, negative
    means they cross.  Unstable growth that leaves ``bounding_radius`` is
    reported as escaped with distance minus the radius, since divergence of
    the manifold only happens past the connection.
    """
    cycle = find_cycle(params, word)
    try:
        wu = grow_manifold(
            params, "unstable", "X", depth_forward,
            vertex_cap=vertex_cap, escape_radius=bounding_radius,
        )
    except EscapeError:
        return HTSample(
            params=params,
            distance=-bounding_radius,
            crossings=0,
            escaped=True,
            depth_forward=depth_forward,
            depth_backward=depth_backward,
        )
    stable = cycle_stable_manifolds(params, cycle, depth_backward, vertex_cap=vertex_cap)
    wu_pts = wu.polyline.vertices
    anchor = np.concatenate([wu_pts, cycle.points])
    lo = anchor.min(axis=0)
    hi = anchor.max(axis=0)
    diag = float(np.hypot(*(hi - lo)))
    if diag == 0.0:
        diag = 1.0
    pad = 0.5 * diag
    lo -= pad
    hi += pad
    e0, e1 = chain_edges([m.polyline.vertices for m in stable])
    c0, c1 = clip_edges_to_box(e0, e1, lo, hi)
    if c0.shape[0] == 0:
        return HTSample(
            params=params,
            distance=diag,
            crossings=0,
            escaped=False,
            depth_forward=depth_forward,
            depth_backward=depth_backward,
        )
    resolution = max(resolution_factor * diag, 1e-9)
    dist, crossings = polyline_clearance(
        chain_edges([wu_pts]), (c0, c1), resolution, first_crossing_only=True
    )
    signed = -dist if crossings > 0 else dist
    return HTSample(
        params=params,
        distance=signed,
        crossings=crossings,
        escaped=False,
        depth_forward=depth_forward,
        depth_backward=depth_backward,
    )


def _detector_probe(
    delta_L: float,
    delta_R: float,
    tau_L: float,
    tau_R: float,
    word: str,
    depth_forward: int,
    depth_backward: int,
) -> tuple[int, float] | None:
    """Detector side and magnitude at one point, None when undefined there.

    The side is -1 on the intersected-or-escaping side and +1 on the
    separated side; bisection runs on this discrete flag because a crossed
    sample reports a clearance of exactly zero, which carries no usable
    sign of its own.
    """
    try:
        params = Params(tau_L, delta_L, tau_R, delta_R)
        sample = ht_distance(
            params,
            word=word,
            depth_forward=depth_forward,
            depth_backward=depth_backward,
        )
    except BcnfError:
        return None
    side = -1 if (sample.escaped or sample.crossings > 0) else 1
    return side, abs(sample.distance)


def _trace_ht_one(args: tuple) -> HTCurveRow:
    """Bracket and bisect the tangency in tau_R at one tau_L."""
    (
        tau_L,
        delta_L,
        delta_R,
        word,
        scan_points,
        bisect_tol,
        depth_forward,
        depth_backward,
        margin,
    ) = args
    lower = TAU_R_FLOOR + margin
    upper = -(delta_R + 1.0) - margin
    if upper <= lower:
        return HTCurveRow(tau_L=tau_L, tau_R_star=None, residual=None, iterations=0)
    grid = np.linspace(lower, upper, scan_points)
    probes = [
        _detector_probe(
            delta_L, delta_R, tau_L, float(tr), word, depth_forward, depth_backward
        )
        for tr in grid
    ]
    lo = hi = None
    side_lo = 0
    residual = math.inf
    for i in range(len(grid) - 1):
        a, b = probes[i], probes[i + 1]
        if a is None or b is None:
            continue
        if a[0] != b[0]:
            lo, hi, side_lo = float(grid[i]), float(grid[i + 1]), a[0]
            residual = a[1] if a[0] > 0 else b[1]
            break
    if lo is None:
        return HTCurveRow(tau_L=tau_L, tau_R_star=None, residual=None, iterations=0)
    iterations = 0
    while hi - lo > bisect_tol:
        mid = 0.5 * (lo + hi)
        p_mid = _detector_probe(
            delta_L, delta_R, tau_L, mid, word, depth_forward, depth_backward
        )
        iterations += 1
        if p_mid is None:
            return HTCurveRow(
                tau_L=tau_L, tau_R_star=None, residual=None, iterations=iterations
            )
        if p_mid[0] > 0:
            residual = min(residual, p_mid[1])
        if p_mid[0] == side_lo:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    return HTCurveRow(tau_L=tau_L, tau_R_star=root, residual=residual, iterations=iterations)


def trace_ht_curve(
    delta_L: float,
    delta_R: float,
    tau_L_values: np.ndarray | list[float],
    *,
    word: str = "LRR",
    scan_points: int = 13,
    bisect_tol: float = 1e-4,
    depth_forward: int = 25,
    depth_backward: int = 15,
    margin: float = 1e-3,
    jobs: int = 1,
) -> CurveTrace:
    """Tangency boundary tau_R*(tau_L) over a list of slice abscissae.

    Each tau_L is handled independently: an ascending coarse scan over the
    admissible tau_R range finds the lowest sign change of the detector and
    bisection refines it to ``bisect_tol``.  Rows without a bracket keep a
    None root.  Work is spread over processes when jobs exceeds one and the
    output is identical for any job count.
    """
    _validate_word(word)
    if scan_points < 2:
        raise ValueError(f"scan_points must be >= 2, got {scan_points}")
    tasks = [
        (
            float(tl),
            float(delta_L),
            float(delta_R),
            word,
            int(scan_points),
            float(bisect_tol),
            int(depth_forward),
            int(depth_backward),
            float(margin),
        )
        for tl in tau_L_values
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_trace_ht_one, tasks))
    else:
        rows = [_trace_ht_one(t) for t in tasks]
    return CurveTrace(
        delta_L=float(delta_L),
        delta_R=float(delta_R),
        word=word,
        bisect_tol=float(bisect_tol),
        depth_forward=int(depth_forward),
        depth_backward=int(depth_backward),
        rows=rows,
    )


def escape_survey(
    params: Params,
    n_seeds: int = 400,
    n_iter: int = 1000,
    radius: float = 1e6,
    *,
    ball_radius: float | None = None,
    seed: int = 0,
) -> EscapeReport:
    """Fraction of seeds near the right fixed point whose orbit blows up.

    Seeds fill a small ball around the fixed point, nudged off it along the
    unstable eigendirection so none of them starts on the stable side
    exactly.  On the trapped side of parameter space every orbit stays
    bounded and the fraction is zero; past the destruction boundary orbits
    leak out along the unstable manifold and the fraction turns positive.
    """
    if n_seeds < 0 or n_iter < 0:
        raise ValueError(f"counts must be >= 0, got {n_seeds}, {n_iter}")
    if n_seeds == 0:
        return EscapeReport(
            n_total=0, n_escaped=0, fraction=0.0, steps=n_iter, radius=radius
        )
    from .core import eigen, fixed_points

    x_point = np.array(fixed_points(params).X, dtype=float)
    eig = eigen(params, "R")
    u = np.array([1.0, eig.slope_u])
    u /= np.hypot(*u)
    if ball_radius is None:
        ball_radius = 1e-3 * (1.0 + float(np.hypot(*x_point)))
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0.0, 2.0 * math.pi, n_seeds)
    radii = ball_radius * np.sqrt(rng.uniform(0.0, 1.0, n_seeds))
    offsets = np.sign(rng.standard_normal(n_seeds))
    pts = (
        x_point
        + np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])
        + (ball_radius * offsets)[:, None] * u
    )
    escaped = np.zeros(n_seeds, dtype=bool)
    r2 = radius * radius
    for _ in range(n_iter):
        alive = ~escaped
        if not alive.any():
            break
        pts[alive] = apply_many(params, pts[alive])
        norms = np.einsum("ij,ij->i", pts[alive], pts[alive])
        idx = np.nonzero(alive)[0]
        escaped[idx[norms > r2]] = True
    n_escaped = int(escaped.sum())
    return EscapeReport(
        n_total=n_seeds,
        n_escaped=n_escaped,
        fraction=n_escaped / n_seeds,
        steps=n_iter,
        radius=radius,
    )


def phi_zero_boundary(
    delta_L: float,
    delta_R: float,
    tau_L: float,
    *,
    tau_R_floor: float = TAU_R_FLOOR,
) -> float | None:
    """Root of phi in tau_R on the admissible range at fixed other parameters.

    Returns None when the slice point admits no root, either because tau_L
    fails the left-piece saddle condition or because phi keeps one sign over
    the range.  The bracket is widened by a hair past the upper endpoint so
    a root landing exactly on the range boundary is still reported.
    """
    if not (delta_L > 0.0 and delta_R > 0.0 and tau_L > delta_L + 1.0):
        return None

    def value(tau_R: float) -> float:
        return phi(Params(tau_L, delta_L, tau_R, delta_R))

    a = tau_R_floor
    b = -(delta_R + 1.0) + 1e-9
    fa, fb = value(a), value(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        return None
    return float(brentq(value, a, b, xtol=1e-12, rtol=8.9e-16))
