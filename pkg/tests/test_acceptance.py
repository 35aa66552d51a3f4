"""Release gate: every headline numeric claim checked at its stated tolerance.

Each test prints a single [PASS] or [FAIL] line naming the criterion, so a
run with ``pytest -s tests/test_acceptance.py`` reads as a checklist.  The
printed verdict always reflects the assertions that follow it.
"""
import time

import numpy as np
import pytest

from bcnflab.core import Params, eigen, fixed_points
from bcnflab.bifurcation import phi_zero_boundary, trace_ht_curve
from bcnflab.manifolds import (
    attractor_cloud,
    coverage_gaps,
    delta_region,
    grow_manifold,
    special_points,
    trapping_region,
)
from bcnflab.paramspace import (
    chaos_indices,
    classify_region,
    find_region_point,
    phi,
    region_code,
    renormalise,
    slice_quantities,
)
from bcnflab.verify import run_verify

XI_A = Params(1.5, 0.2, -2.0, 0.5)


def _gate(name: str, ok: bool, detail: str = "") -> None:
    tag = "PASS" if ok else "FAIL"
    line = f"[{tag}] {name}"
    if detail:
        line += f"  ({detail})"
    print(line)
    assert ok, line


def _roots_eigen(tau: float, delta: float) -> tuple[float, float]:
    """Independent eigenvalue evaluation for the closed-form cross-check."""
    r = np.roots([1.0, -tau, delta])
    r = sorted((float(v.real) for v in r), key=abs, reverse=True)
    return r[0], r[1]


class TestClosedForms:
    def test_landmark_points(self):
        lu_L, ls_L = _roots_eigen(XI_A.tau_L, XI_A.delta_L)
        lu_R, ls_R = _roots_eigen(XI_A.tau_R, XI_A.delta_R)

        # D, V, U rebuilt from the eigenvalue parametrisation
        d_expect = 1.0 / (1.0 - ls_L)
        v_expect = -lu_R / (lu_R - 1.0)
        u_expect = -XI_A.delta_R / ((ls_L - XI_A.tau_R) * (1.0 - ls_L))

        fp = fixed_points(XI_A)
        sp = special_points(XI_A)
        errs = {
            "X": max(abs(fp.X.x - 2.0 / 7.0), abs(fp.X.y + 1.0 / 7.0)),
            "D": max(abs(sp.D.x - d_expect), abs(sp.D.y)),
            "V": max(abs(sp.V.x), abs(sp.V.y - v_expect)),
            "U": max(abs(sp.U.x), abs(sp.U.y - u_expect)),
        }
        worst = max(errs.values())
        _gate(
            "closed-form landmark points within 1e-9 of independent evaluation",
            worst < 1e-9,
            f"worst deviation {worst:.3g}",
        )


class TestRegionCalculus:
    def test_classification_of_reference_point(self):
        rc = classify_region(XI_A)
        idx = chaos_indices(XI_A)
        g = renormalise(XI_A)
        ok = (
            region_code(rc) == "R0"
            and rc.rn_index == 0
            and idx.thm2_applies
            and abs(phi(XI_A) - 0.42958) < 5e-6
            and g == Params(3.0, 0.25, -3.7, 0.1)
            and phi(g) < 0.0
        )
        _gate(
            "reference point classifies as the n=0 chaotic region",
            ok,
            f"code {region_code(rc)}, phi {phi(XI_A):.5f}, renormalised {g}",
        )


class TestSliceCorner:
    def test_root_finder_hits_corner(self):
        tau_L = slice_quantities(0.2, 0.5, 2.0).tau_L_corner
        root = phi_zero_boundary(0.2, 0.5, tau_L)
        ok = root is not None and abs(root - (-1.5)) < 1e-6
        _gate(
            "phi root at the slice-corner tau_L lands on tau_R = -1.5 within 1e-6",
            ok,
            f"tau_L {tau_L:.7f}, root {root}",
        )


class TestPropertySuites:
    def test_thousand_sample_battery(self):
        t0 = time.time()
        report = run_verify(n_random=1000)
        elapsed = time.time() - t0
        failing = [r.name for r in report.results if not r.passed]
        _gate(
            "randomised invariant battery: 1000 samples, zero violations, under a minute",
            not failing and elapsed < 60.0,
            f"{len(report.results)} checks, {elapsed:.1f}s"
            + (f", failing {failing}" if failing else ""),
        )


class TestCrisisCurve:
    def test_crisis_value_and_depth_stability(self):
        trace = trace_ht_curve(0.2, 0.5, [1.3])
        star = trace.rows[0].tau_R_star
        deeper = trace_ht_curve(
            0.2, 0.5, [1.3],
            depth_forward=trace.depth_forward + 4,
            depth_backward=trace.depth_backward + 4,
        )
        star_deep = deeper.rows[0].tau_R_star
        stable = (
            star is not None
            and star_deep is not None
            and abs(star - star_deep) <= 10.0 * trace.bisect_tol
        )
        value_ok = star is not None and abs(star - (-1.727455)) <= 5e-4
        _gate(
            "crisis curve at tau_L = 1.3: value -1.727455 within 5e-4, depth-stable",
            value_ok and stable,
            f"measured {star}, deeper {star_deep}, "
            f"depth drift {abs(star - star_deep):.2e}"
            if star is not None and star_deep is not None
            else f"measured {star}, deeper {star_deep}",
        )


class TestAttractorStructure:
    def test_component_counts_and_trapping(self):
        cloud0 = attractor_cloud(XI_A)
        trap = trapping_region(XI_A)
        inside = trap.omega.contains(cloud0.points, slack=1e-9).all()

        p1 = find_region_point(0.2, 0.5, 1)
        assert p1 is not None
        cloud1 = attractor_cloud(p1)
        ok = (
            cloud0.n_components == 1
            and bool(inside)
            and cloud0.meta["n_outside_trap"] == 0
            and cloud1.n_components == 2
        )
        _gate(
            "attractor: one component in the base region, two after renormalisation, "
            "cloud inside the trapping triangle",
            ok,
            f"components {cloud0.n_components}/{cloud1.n_components}, "
            f"outside {cloud0.meta['n_outside_trap']}",
        )


class TestManifoldDensity:
    def test_gap_shrinks_with_depth(self):
        trap = trapping_region(XI_A)
        gaps = {
            d: coverage_gaps(
                [grow_manifold(XI_A, "stable", "X", d).polyline.vertices], trap.omega
            ).max_gap
            for d in (8, 12)
        }
        _gate(
            "incoming-manifold density: max gap strictly shrinks from depth 8 to 12",
            gaps[12] < gaps[8],
            f"gap {gaps[8]:.4f} -> {gaps[12]:.4f}",
        )


class TestAttractorCoverage:
    def test_cloud_inside_depth20_union(self):
        cloud = attractor_cloud(XI_A)
        region = delta_region(XI_A, 20)
        covered = region.contains(cloud.points, slack=1e-3)
        n_out = int((~covered).sum())
        _gate(
            "attractor cloud sits in the depth-20 image union within 1e-3 dilation",
            n_out == 0,
            f"{n_out} of {len(cloud.points)} points uncovered",
        )


class TestChaosConditionFlags:
    def test_flags_at_reference_point(self):
        idx = chaos_indices(XI_A)
        eL, eR = eigen(XI_A, "L"), eigen(XI_A, "R")
        ok = (
            classify_region(XI_A).in_Phi_BYG
            and idx.thm2_applies
            and idx.J1 > 1.0
            and idx.sum_stable < 1.0
            and eL.lambda_u > 1.0
            and abs(eR.lambda_u) > 1.0
        )
        _gate(
            "chaos condition flags hold at the reference point",
            ok,
            f"J1 {idx.J1:.4f}, stable sum {idx.sum_stable:.4f}",
        )
