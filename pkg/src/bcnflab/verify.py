"""Cross-module consistency checks runnable as one self-test battery.

Every check replays an identity or a qualitative fact that the rest of the
package relies on, either at one parameter point or over a batch of seeded
random draws, and records the worst deviation it saw.  The battery is meant
to be cheap enough to run routinely; the heavyweight end-to-end runs live in
the test suite instead.

The ``corrupt`` switch replaces every tolerance with an impossible value so
that the reporting and exit-status plumbing can itself be exercised.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bifurcation import find_cycle
from .core import (
    Params,
    apply,
    apply_inverse,
    apply_inverse_many,
    apply_many,
    eigen,
    eigen_pair,
    fixed_points,
    jacobian,
)
from .errors import BcnfError, ItineraryMismatchError, SingularCompositionError
from .geometry import cone_step, inverted_cone, longest_piece_bound, standard_cone
from .manifolds import (
    attractor_cloud,
    grow_manifold,
    special_points,
    trapping_region,
)
from .paramspace import (
    chaos_indices,
    classify_region,
    phi,
    renormalise,
    sample_phi,
    sample_phi_byg,
    slice_quantities,
)

__all__ = ["CheckResult", "VerifyReport", "run_verify", "DEFAULT_POINT"]

# The resident example point: a saddle-region parameter with phi > 0 and a
# one-component attractor.  Point-scope checks run here unless the caller
# supplies another point.
DEFAULT_POINT = Params(tau_L=1.5, delta_L=0.2, tau_R=-2.0, delta_R=0.5)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one check: worst deviation against its tolerance."""

    name: str
    samples: int
    worst: float
    tol: float
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.worst <= self.tol


@dataclass(frozen=True)
class VerifyReport:
    point: Params
    n_random: int
    seed: int
    corrupt: bool
    results: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def format(self) -> str:
        lines = [
            f"self-test battery at point ({self.point.tau_L:g}, {self.point.delta_L:g}, "
            f"{self.point.tau_R:g}, {self.point.delta_R:g}), "
            f"n_random={self.n_random}, seed={self.seed}"
            + ("  [corrupted tolerances]" if self.corrupt else "")
        ]
        for r in self.results:
            status = "PASS" if r.passed else "FAIL"
            line = (
                f"[{status}] {r.name:44s} samples={r.samples:<6d} "
                f"worst={r.worst:<12.3e} tol={r.tol:.3e}"
            )
            if r.note:
                line += f"  ({r.note})"
            lines.append(line)
        n_pass = sum(r.passed for r in self.results)
        lines.append(f"{n_pass}/{len(self.results)} checks passed")
        return "\n".join(lines)


class _Battery:
    """Collects check results, applying the corrupt-tolerance switch."""

    def __init__(self, corrupt: bool) -> None:
        self.corrupt = corrupt
        self.results: list[CheckResult] = []

    def record(self, name: str, samples: int, worst: float, tol: float, note: str = "") -> None:
        if self.corrupt:
            tol = -math.inf
        self.results.append(
            CheckResult(name=name, samples=samples, worst=float(worst), tol=tol, note=note)
        )


def _rel_gap(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b))


# ---------------------------------------------------------------------------
# map core


def _check_switching_continuity(b: _Battery, rng, n: int) -> None:
    """Both half-map formulas must agree exactly on the switching line."""
    worst = 0.0
    for _ in range(n):
        p = sample_phi(rng)
        y = rng.uniform(-10.0, 10.0)
        left = (p.tau_L * 0.0 + y + 1.0, -p.delta_L * 0.0)
        right = (p.tau_R * 0.0 + y + 1.0, -p.delta_R * 0.0)
        worst = max(worst, abs(left[0] - right[0]), abs(left[1] - right[1]))
    b.record("core/switching-line-continuity", n, worst, 0.0)


def _check_round_trip(b: _Battery, rng, n: int) -> None:
    worst = 0.0
    for _ in range(n):
        p = sample_phi(rng)
        pt = (rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0))
        fwd = apply_inverse(p, apply(p, pt))
        bwd = apply(p, apply_inverse(p, pt))
        scale = max(1.0, abs(pt[0]), abs(pt[1]))
        worst = max(
            worst,
            abs(fwd.x - pt[0]) / scale,
            abs(fwd.y - pt[1]) / scale,
            abs(bwd.x - pt[0]) / scale,
            abs(bwd.y - pt[1]) / scale,
        )
    b.record("core/inverse-round-trip", n, worst, 1e-10)


def _check_eigen_identities(b: _Battery, rng, n: int) -> None:
    """Trace and determinant must be recovered from each eigenvalue pair."""
    worst = 0.0
    for _ in range(n):
        p = sample_phi(rng)
        for side in ("L", "R"):
            tau, delta = p.side(side)
            e = eigen_pair(tau, delta)
            worst = max(
                worst,
                _rel_gap(e.lambda_u * e.lambda_s, delta),
                _rel_gap(e.lambda_u + e.lambda_s, tau),
            )
    b.record("core/eigenvalue-identities", n, worst, 1e-12)


def _check_fixed_point_residuals(b: _Battery, rng, n: int) -> None:
    worst = 0.0
    for _ in range(n):
        p = sample_phi(rng)
        fp = fixed_points(p)
        for pt in (fp.X, fp.Y):
            img = apply(p, pt)
            worst = max(worst, math.hypot(img.x - pt.x, img.y - pt.y))
    b.record("core/fixed-point-residuals", n, worst, 1e-12)


def _check_eigen_ordering(b: _Battery, rng, n: int) -> None:
    """Saddle-region eigenvalues must interleave with the unit circle.

    The worst value reported is the largest margin violation: zero or
    negative means every strict ordering held with room to spare.
    """
    worst = -math.inf
    for _ in range(n):
        p = sample_phi(rng)
        eL = eigen(p, "L")
        eR = eigen(p, "R")
        margins = (
            eL.lambda_s,  # > 0
            1.0 - eL.lambda_s,
            eL.lambda_u - 1.0,
            -1.0 - eR.lambda_u,  # lambda_R^u < -1
            eR.lambda_s - eR.lambda_u,
            -eR.lambda_s,  # lambda_R^s < 0
        )
        worst = max(worst, -min(margins))
    b.record("core/eigenvalue-ordering", n, worst, 0.0, "worst = -min strict-inequality margin")


# ---------------------------------------------------------------------------
# parameter space


def _check_index_excludes_deeper_windows(b: _Battery, rng, n: int) -> None:
    """When the one-sided expansion index exceeds one, the renormalised
    point must fall outside the positive-phi set (no deeper doubling)."""
    worst = -math.inf
    used = 0
    tries = 0
    while used < n and tries < 50 * n:
        tries += 1
        p = sample_phi(rng)
        try:
            idx = chaos_indices(p)
        except BcnfError:
            continue
        if idx.J1 <= 1.0:
            continue
        used += 1
        worst = max(worst, phi(renormalise(p)))
    b.record(
        "paramspace/index-excludes-deeper-windows",
        used,
        worst,
        0.0,
        "worst = max phi after renormalisation",
    )


def _check_critical_slope_margin(b: _Battery, rng, n: int) -> None:
    """The critical cone slope must clear twice the right determinant."""
    worst = -math.inf
    for _ in range(n):
        p = sample_phi_byg(rng)
        q = slice_quantities(p.delta_L, p.delta_R, p.tau_L)
        worst = max(worst, 2.0 * p.delta_R - q.m_crit)
    b.record("paramspace/critical-slope-margin", n, worst, 0.0, "worst = 2*delta_R - m_crit")


def _check_window_index_first_match(b: _Battery, rng, n: int) -> None:
    """The reported window index must be the first sign change of phi along
    the renormalisation orbit, recomputed here by direct iteration."""
    bad = 0
    for _ in range(n):
        p = sample_phi(rng)
        rc = classify_region(p)
        expected = None
        q = p
        prev = phi(q)
        for k in range(13):
            try:
                q = renormalise(q)
                cur = phi(q)
            except (OverflowError, ValueError):
                cur = -math.inf
            if not math.isfinite(cur) and cur != -math.inf:
                cur = -math.inf
            if prev > 0.0 and cur <= 0.0:
                expected = k
                break
            prev = cur
            if cur == -math.inf:
                break
        if rc.rn_index != expected:
            bad += 1
    b.record("paramspace/window-index-first-match", n, float(bad), 0.0, "worst = mismatches")


def _check_phi_negative_for_weak_left_contraction(b: _Battery, rng, n: int) -> None:
    """With left determinant at or above one, phi can never be positive, so
    every doubling window requires delta_L < 1."""
    worst = -math.inf
    for _ in range(n):
        dl = rng.uniform(1.0, 3.0)
        dr = rng.uniform(0.0, 1.0)
        tl = rng.uniform(dl + 1.0, dl + 3.5)
        tr = rng.uniform(-5.0, -(dr + 1.0))
        worst = max(worst, phi(Params(tl, dl, tr, dr)))
    b.record(
        "paramspace/phi-nonpositive-above-unit-delta-L",
        n,
        worst,
        0.0,
        "worst = max phi over delta_L >= 1",
    )


def _check_renormalisation_corner(b: _Battery) -> None:
    corner = Params(1.0, 0.0, -1.0, 0.0)
    img = renormalise(corner)
    worst = max(abs(a - c) for a, c in zip(img.astuple(), corner.astuple()))
    b.record("paramspace/renormalisation-corner-fixed", 1, worst, 0.0)


# ---------------------------------------------------------------------------
# piecewise-linear geometry


def _check_cone_invariance(b: _Battery, rng, n: int) -> None:
    worst = -math.inf
    for _ in range(n):
        p = sample_phi(rng)
        lo, hi = standard_cone(p).K
        m = rng.uniform(lo, hi)
        for side in ("L", "R"):
            g = cone_step(p, side, m)
            worst = max(worst, lo - g, g - hi)
    b.record("geometry/cone-invariance", n, worst, 1e-12, "worst = overshoot past cone ends")


def _check_cone_expansion(b: _Battery, rng, n: int) -> None:
    """Each half-map must stretch cone vectors by its advertised factor."""
    worst = -math.inf
    for _ in range(n):
        p = sample_phi(rng)
        lo, hi = standard_cone(p).K
        eL = eigen(p, "L")
        eR = eigen(p, "R")
        a = abs(eR.lambda_u)
        factors = {"L": eL.lambda_u, "R": min(a, (a + 1.0) / math.sqrt(2.0))}
        m = rng.uniform(lo, hi)
        v = np.array([1.0, m])
        nv = math.hypot(1.0, m)
        for side in ("L", "R"):
            img = jacobian(p, side) @ v
            worst = max(worst, factors[side] * nv - math.hypot(img[0], img[1]))
    b.record("geometry/cone-expansion", n, worst, 1e-9, "worst = shortfall below factor")


def _check_inverse_cone(b: _Battery, rng, n: int) -> None:
    """Backward cone: invariance of the x/y-slope interval and expansion of
    the inverse Jacobians by the per-side factors."""
    worst_inv = -math.inf
    worst_exp = -math.inf
    for _ in range(n):
        p = sample_phi(rng)
        lo, hi = inverted_cone(p).K
        m = rng.uniform(lo, hi)
        v = np.array([m, 1.0])
        nv = math.hypot(m, 1.0)
        for side in ("L", "R"):
            g = cone_step(p, side, m, inverted=True)
            worst_inv = max(worst_inv, lo - g, g - hi)
            s = abs(eigen(p, side).lambda_s)
            factor = min(1.0 / s, (1.0 + s) / (math.sqrt(2.0) * s))
            img = np.linalg.solve(jacobian(p, side), v)
            worst_exp = max(worst_exp, factor * nv - math.hypot(img[0], img[1]))
    b.record("geometry/inverse-cone-invariance", n, worst_inv, 1e-12)
    b.record("geometry/inverse-cone-expansion", n, worst_exp, 1e-9)


def _check_inverse_budget_identity(b: _Battery, rng, n: int) -> None:
    """The two-sided contraction index must equal the summed reciprocals of
    the backward expansion factors."""
    worst = 0.0
    for _ in range(n):
        p = sample_phi(rng)
        idx = chaos_indices(p)
        total = 0.0
        for side in ("L", "R"):
            s = abs(eigen(p, side).lambda_s)
            total += 1.0 / min(1.0 / s, (1.0 + s) / (math.sqrt(2.0) * s))
        worst = max(worst, _rel_gap(idx.J2, total))
    b.record("geometry/inverse-budget-identity", n, worst, 1e-12)


def _check_inverse_eigenvalue_reciprocity(b: _Battery, rng, n: int) -> None:
    worst = 0.0
    for _ in range(n):
        p = sample_phi(rng)
        for side in ("L", "R"):
            e = eigen(p, side)
            ev = sorted(np.linalg.eigvals(np.linalg.inv(jacobian(p, side))).real)
            expect = sorted((1.0 / e.lambda_u, 1.0 / e.lambda_s))
            worst = max(worst, _rel_gap(ev[0], expect[0]), _rel_gap(ev[1], expect[1]))
    b.record("geometry/inverse-eigenvalue-reciprocity", n, worst, 1e-12)


def _check_segment_image_length(b: _Battery, rng, n: int) -> None:
    """A segment inside one half-plane maps affinely, so its image length is
    the matrix applied to its direction vector."""
    worst = 0.0
    for _ in range(n):
        p = sample_phi(rng)
        side = "L" if rng.uniform() < 0.5 else "R"
        sign = -1.0 if side == "L" else 1.0
        x0 = sign * rng.uniform(0.1, 3.0)
        x1 = sign * rng.uniform(0.1, 3.0)
        if x0 == x1:
            continue
        a = (x0, rng.uniform(-2.0, 2.0))
        c = (x1, rng.uniform(-2.0, 2.0))
        fa, fc = apply(p, a), apply(p, c)
        img_len = math.hypot(fc.x - fa.x, fc.y - fa.y)
        v = np.array([c[0] - a[0], c[1] - a[1]])
        expect = float(np.linalg.norm(jacobian(p, side) @ v))
        worst = max(worst, _rel_gap(img_len, expect))
    b.record("geometry/segment-image-length", n, worst, 1e-12)


def _check_cut_segment_growth(b: _Battery, rng, n: int) -> None:
    """A segment cut by the switching line leaves at least one image piece
    longer than the guaranteed fraction of the original length."""
    worst = -math.inf
    for _ in range(n):
        p = sample_phi_byg(rng)
        lo, hi = standard_cone(p).K
        eL = eigen(p, "L")
        a_u = abs(eigen(p, "R").lambda_u)
        bound = longest_piece_bound(eL.lambda_u, min(a_u, (a_u + 1.0) / math.sqrt(2.0)))
        m = rng.uniform(lo, hi)
        y0 = rng.uniform(-2.0, 2.0)
        t1 = rng.uniform(0.1, 2.0)
        t2 = rng.uniform(0.1, 2.0)
        left = (-t1, y0 - m * t1)
        cut = (0.0, y0)
        right = (t2, y0 + m * t2)
        alpha = (t1 + t2) * math.hypot(1.0, m)
        f_left, f_cut, f_right = apply(p, left), apply(p, cut), apply(p, right)
        len_l = math.hypot(f_cut.x - f_left.x, f_cut.y - f_left.y)
        len_r = math.hypot(f_right.x - f_cut.x, f_right.y - f_cut.y)
        worst = max(worst, bound * alpha - max(len_l, len_r))
    b.record("geometry/cut-segment-growth", n, worst, 1e-9, "worst = shortfall below bound")


# ---------------------------------------------------------------------------
# manifolds


def _check_landmark_gap_identity(b: _Battery, rng, n: int) -> None:
    """The vertical gap between the two switching-line landmarks must match
    its factored closed form, and be positive when the stable eigenvalues
    sum below one."""
    worst = 0.0
    worst_sign = -math.inf
    for _ in range(n):
        p = sample_phi(rng)
        sp = special_points(p)
        eL = eigen(p, "L")
        eR = eigen(p, "R")
        gap = sp.U.y - sp.V.y
        expr = (
            abs(eR.lambda_u)
            * (1.0 - eL.lambda_s + eR.lambda_s)
            * (eL.lambda_s - eR.lambda_u)
            / ((1.0 - eL.lambda_s) * (1.0 - eR.lambda_u) * (eL.lambda_s - p.tau_R))
        )
        worst = max(worst, _rel_gap(gap, expr))
        if eL.lambda_s + abs(eR.lambda_s) < 1.0:
            worst_sign = max(worst_sign, -gap)
    b.record("manifolds/landmark-gap-identity", n, worst, 1e-12)
    b.record(
        "manifolds/landmark-gap-positive",
        n,
        worst_sign,
        0.0,
        "worst = -gap where stable sum < 1",
    )


def _check_trap_forward_invariance(b: _Battery, rng, n_points: int, n_param: int) -> None:
    escaped = 0
    total = 0
    for _ in range(n_param):
        p = sample_phi_byg(rng)
        trap = trapping_region(p)
        v = trap.omega.vertices
        lo, hi = v.min(axis=0), v.max(axis=0)
        slack = 1e-9 * max(1.0, trap.omega.diameter())
        pts = []
        while len(pts) < n_points:
            cand = rng.uniform(lo, hi, size=(4 * n_points, 2))
            pts.extend(cand[trap.omega.contains(cand)][: n_points - len(pts)])
        pts = np.array(pts)
        total += pts.shape[0]
        for _ in range(100):
            pts = apply_many(p, pts)
            inside = trap.omega.contains(pts, slack=slack)
            if not inside.all():
                escaped += int(np.count_nonzero(~inside))
                pts = pts[inside]
        if pts.shape[0] == 0:
            break
    b.record(
        "manifolds/trap-forward-invariance",
        total,
        float(escaped),
        0.0,
        "worst = points that left the trap in 100 steps",
    )


def _check_unstable_edge_slopes(b: _Battery, rng, n_param: int) -> None:
    """Every edge of the outgoing-manifold polyline must have slope inside
    the forward cone interval.

    Edges whose length is at roundoff scale are repeated points in disguise
    (chain junctions and crossing insertions can leave behind slivers of
    length ~1e-14); their direction is pure noise, so only edges carrying at
    least 1e-9 of the polyline diameter count.
    """
    worst = -math.inf
    edges = 0
    for _ in range(n_param):
        p = sample_phi_byg(rng)
        lo, hi = standard_cone(p).K
        try:
            wu = grow_manifold(p, "unstable", "X", depth=8, escape_radius=1e9)
        except BcnfError:
            continue
        v = wu.polyline.vertices
        d = np.diff(v, axis=0)
        diag = float(np.linalg.norm(v.max(axis=0) - v.min(axis=0)))
        keep = np.hypot(d[:, 0], d[:, 1]) >= 1e-9 * max(diag, 1.0)
        slopes = d[keep, 1] / d[keep, 0]
        edges += int(np.count_nonzero(keep))
        worst = max(worst, float(np.max(lo - slopes)), float(np.max(slopes - hi)))
    b.record(
        "manifolds/unstable-edge-slopes",
        edges,
        worst,
        1e-9,
        "worst = overshoot past cone ends",
    )


def _check_stable_seed_collinearity(b: _Battery, rng, n: int) -> None:
    """The incoming-manifold seed points must sit on the eigenline through
    the right fixed point."""
    worst = 0.0
    for _ in range(n):
        p = sample_phi(rng)
        sp = special_points(p)
        fp = fixed_points(p)
        slope = eigen(p, "R").slope_s
        for pt in (sp.V, sp.f_V, sp.finv_V):
            resid = abs((pt.y - fp.X.y) - slope * (pt.x - fp.X.x))
            worst = max(worst, resid / max(1.0, abs(pt.x - fp.X.x)))
    b.record("manifolds/stable-seed-collinearity", n, worst, 1e-9)


def _check_backward_divergence(b: _Battery, rng, n_seeds: int, n_param: int) -> None:
    """With the two-sided contraction index below one, almost every point
    has a divergent backward orbit; each seed gets a few jittered starts and
    at least one must blow past norm 1e6 within 1e4 backward steps."""
    jitter = 1e-3
    failures = 0
    total = 0
    for _ in range(n_param):
        p = None
        for _ in range(200):
            cand = sample_phi(rng)
            try:
                if chaos_indices(cand).J2 < 1.0:
                    p = cand
                    break
            except BcnfError:
                continue
        if p is None:
            continue
        seeds = rng.uniform(-3.0, 3.0, size=(n_seeds, 2))
        starts = np.repeat(seeds, 3, axis=0)
        starts += rng.uniform(-jitter, jitter, size=starts.shape)
        escaped = np.zeros(starts.shape[0], dtype=bool)
        pts = starts.copy()
        active = np.arange(starts.shape[0])
        for _ in range(10_000):
            pts = apply_inverse_many(p, pts)
            out = np.einsum("ij,ij->i", pts, pts) > 1e12
            if out.any():
                escaped[active[out]] = True
                pts = pts[~out]
                active = active[~out]
            if active.size == 0:
                break
        per_seed = escaped.reshape(n_seeds, 3).any(axis=1)
        failures += int(np.count_nonzero(~per_seed))
        total += n_seeds
    b.record(
        "manifolds/backward-divergence",
        total,
        float(failures),
        0.0,
        "worst = seeds with no divergent backward orbit nearby",
    )


def _check_attractor_two_sided(b: _Battery, point: Params, rng, n_param: int) -> None:
    """Sampled attractors must put points strictly on both sides of the
    switching line."""
    worst = -math.inf
    used = 0
    candidates = [point]
    tries = 0
    while len(candidates) < 1 + n_param and tries < 200:
        tries += 1
        p = sample_phi_byg(rng)
        if classify_region(p).rn_index == 0:
            candidates.append(p)
    for p in candidates:
        try:
            cloud = attractor_cloud(p, transient=500, samples=20_000)
        except BcnfError:
            continue
        used += 1
        n_left = int(np.count_nonzero(cloud.points[:, 0] < 0.0))
        n_right = int(np.count_nonzero(cloud.points[:, 0] > 0.0))
        worst = max(worst, 1.0 - min(n_left, n_right))
    b.record(
        "manifolds/attractor-two-sidedness",
        used,
        worst,
        0.0,
        "worst = 1 - min(points per side)",
    )


# ---------------------------------------------------------------------------
# cycles


def _check_cycles(b: _Battery, point: Params, rng, n_param: int) -> None:
    """Replay residuals plus invariance of cycles under word rotation."""
    worst_resid = 0.0
    worst_match = 0.0
    worst_mult = 0.0
    found = 0
    candidates = [point] + [sample_phi_byg(rng) for _ in range(n_param)]
    for p in candidates:
        for word in ("LR", "LRR", "LLR"):
            try:
                cyc = find_cycle(p, word)
            except (ItineraryMismatchError, SingularCompositionError):
                continue
            found += 1
            q = cyc.points[0]
            for _ in range(cyc.period):
                q = np.array(apply(p, q))
            worst_resid = max(worst_resid, float(np.linalg.norm(q - cyc.points[0])))
            rotated = word[1:] + word[0]
            try:
                cyc_rot = find_cycle(p, rotated)
            except (ItineraryMismatchError, SingularCompositionError):
                worst_match = max(worst_match, math.inf)
                continue
            # same point set: each rotated point must appear among the
            # originals, and multipliers must agree as spectra
            for pt in cyc_rot.points:
                gap = float(np.min(np.linalg.norm(cyc.points - pt, axis=1)))
                worst_match = max(worst_match, gap)
            for mu, mu_rot in zip(cyc.multipliers, cyc_rot.multipliers):
                worst_mult = max(
                    worst_mult, abs(mu - mu_rot) / max(1.0, abs(mu), abs(mu_rot))
                )
    b.record("bifurcation/cycle-replay-residuals", found, worst_resid, 1e-10)
    b.record("bifurcation/word-rotation-same-points", found, worst_match, 1e-9)
    b.record("bifurcation/word-rotation-same-multipliers", found, worst_mult, 1e-9)


# ---------------------------------------------------------------------------
# entry point


def run_verify(
    point: Params | None = None,
    *,
    n_random: int = 500,
    seed: int = 0,
    corrupt: bool = False,
) -> VerifyReport:
    """Run the whole battery and return its report.

    ``n_random`` scales the sampled checks; the structural ones that grow
    manifolds or attractors use small internal counts regardless, to keep
    the battery interactive.  ``corrupt`` replaces every tolerance with an
    impossible value, forcing all checks to fail; it exists so callers can
    test their handling of a failing report.
    """
    if point is None:
        point = DEFAULT_POINT
    if n_random < 1:
        raise ValueError(f"n_random must be >= 1, got {n_random}")
    rng = np.random.default_rng(seed)
    b = _Battery(corrupt)

    _check_switching_continuity(b, rng, n_random)
    _check_round_trip(b, rng, n_random)
    _check_eigen_identities(b, rng, n_random)
    _check_fixed_point_residuals(b, rng, n_random)
    _check_eigen_ordering(b, rng, n_random)

    _check_index_excludes_deeper_windows(b, rng, n_random)
    _check_critical_slope_margin(b, rng, n_random)
    _check_window_index_first_match(b, rng, min(n_random, 200))
    _check_phi_negative_for_weak_left_contraction(b, rng, n_random)
    _check_renormalisation_corner(b)

    _check_cone_invariance(b, rng, n_random)
    _check_cone_expansion(b, rng, n_random)
    _check_inverse_cone(b, rng, n_random)
    _check_inverse_budget_identity(b, rng, n_random)
    _check_inverse_eigenvalue_reciprocity(b, rng, min(n_random, 200))
    _check_segment_image_length(b, rng, n_random)
    _check_cut_segment_growth(b, rng, n_random)

    _check_landmark_gap_identity(b, rng, n_random)
    _check_trap_forward_invariance(b, rng, n_points=100, n_param=5)
    _check_unstable_edge_slopes(b, rng, n_param=10)
    _check_stable_seed_collinearity(b, rng, n_random)
    _check_backward_divergence(b, rng, n_seeds=100, n_param=2)
    _check_attractor_two_sided(b, point, rng, n_param=3)

    _check_cycles(b, point, rng, n_param=10)

    return VerifyReport(
        point=point, n_random=n_random, seed=seed, corrupt=corrupt, results=b.results
    )
