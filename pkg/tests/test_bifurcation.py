"""Periodic cycles, the tangency detector and the escape survey."""
import numpy as np
import pytest

from bcnflab.core import Params, apply
from bcnflab.errors import (
    ItineraryMismatchError,
    PointUndefinedError,
    SingularCompositionError,
)
from bcnflab.bifurcation import (
    cycle_stable_manifolds,
    escape_survey,
    find_cycle,
    ht_distance,
    phi_zero_boundary,
    trace_ht_curve,
)
from bcnflab.geometry import points_to_segments_distance

XI_A = Params(1.5, 0.2, -2.0, 0.5)
XI_B = Params(1.3, 0.2, -1.7, 0.5)

# three-step cycle at the slice point, frozen from a converged run
LRR_POINTS = np.array(
    [
        [-0.33569448721897127, -0.36341238065906994],
        [0.20018478595626743, 0.06713889744379425],
        [0.7268247613181396, -0.10009239297813372],
    ]
)
LRR_MULTIPLIERS = (4.2853322933725995, 0.011667706627401398)


class TestFindCycle:
    def test_frozen_three_cycle(self):
        c = find_cycle(XI_B, "LRR")
        assert c.period == 3
        assert c.points == pytest.approx(LRR_POINTS, abs=1e-12)
        assert c.multipliers[0].real == pytest.approx(LRR_MULTIPLIERS[0], rel=1e-12)
        assert c.multipliers[1].real == pytest.approx(LRR_MULTIPLIERS[1], rel=1e-9)
        assert c.saddle

    def test_points_sit_in_their_half_planes(self):
        c = find_cycle(XI_B, "LRR")
        assert c.points[0, 0] < 0
        assert c.points[1, 0] >= 0 and c.points[2, 0] >= 0

    def test_replay_closes_the_loop(self):
        c = find_cycle(XI_B, "LRR")
        p = tuple(c.points[0])
        for _ in range(3):
            p = apply(XI_B, p)
        assert p == pytest.approx(tuple(c.points[0]), abs=1e-10)

    def test_multiplier_product_is_jacobian_determinant(self):
        c = find_cycle(XI_B, "LRR")
        det = 0.2 * 0.5 * 0.5  # one left letter, two right letters
        assert np.prod(c.multipliers) == pytest.approx(det, rel=1e-10)

    def test_rotated_word_gives_same_orbit(self):
        a = find_cycle(XI_B, "LRR")
        b = find_cycle(XI_B, "RRL")
        sa = np.array(sorted(map(tuple, a.points)))
        sb = np.array(sorted(map(tuple, b.points)))
        assert sa == pytest.approx(sb, abs=1e-10)
        assert a.multipliers[0] == pytest.approx(b.multipliers[0], rel=1e-9)

    def test_wrong_itinerary_is_rejected(self):
        with pytest.raises(ItineraryMismatchError):
            find_cycle(XI_B, "LLRR")

    def test_singular_composition_is_reported(self):
        with pytest.raises(SingularCompositionError):
            find_cycle(Params(1.5, 0.2, 1.5, 0.5), "R")

    def test_word_validation(self):
        with pytest.raises(ValueError):
            find_cycle(XI_B, "")
        with pytest.raises(ValueError):
            find_cycle(XI_B, "LRX")

    def test_non_saddle_cycle(self):
        c = find_cycle(Params(1.5, 0.2, -1.0, 0.5), "R")
        assert c.multipliers[0] == pytest.approx(-0.5 + 0.5j, abs=1e-12)
        assert c.multipliers[1] == pytest.approx(-0.5 - 0.5j, abs=1e-12)
        assert not c.saddle


class TestCycleStableManifolds:
    def test_one_chain_per_point(self):
        c = find_cycle(XI_B, "LRR")
        chains = cycle_stable_manifolds(XI_B, c, 6)
        assert len(chains) == 3
        for i, ch in enumerate(chains):
            assert ch.kind == "stable"
            assert ch.base == "cycle-LRR"
            assert ch.branch == str(i)
            assert ch.depth == 6
            v = ch.polyline.vertices
            d = points_to_segments_distance(c.points[i][None, :], v[:-1], v[1:])
            assert d[0] < 1e-9

    def test_non_saddle_has_no_stable_chain(self):
        p = Params(1.5, 0.2, -1.0, 0.5)
        c = find_cycle(p, "R")
        with pytest.raises(PointUndefinedError):
            cycle_stable_manifolds(p, c, 4)


class TestTangencyDetector:
    def test_separated_side(self):
        s = ht_distance(XI_B, depth_forward=22, depth_backward=12)
        assert s.distance == pytest.approx(0.019526429386917007, rel=1e-6)
        assert s.crossings == 0
        assert not s.escaped
        assert (s.depth_forward, s.depth_backward) == (22, 12)

    def test_crossed_side(self):
        s = ht_distance(
            Params(1.3, 0.2, -1.75, 0.5), depth_forward=22, depth_backward=12
        )
        assert s.distance <= 0.0
        assert s.crossings > 0
        assert not s.escaped


class TestCurveTrace:
    def test_light_trace_brackets_and_skips(self):
        tr = trace_ht_curve(
            0.2,
            0.5,
            [1.1, 1.3],
            scan_points=5,
            bisect_tol=5e-2,
            depth_forward=8,
            depth_backward=4,
        )
        assert (tr.word, tr.depth_forward, tr.depth_backward) == ("LRR", 8, 4)
        below, bracketed = tr.rows
        # the left piece is not a saddle at tau_L = 1.1, so no row quantities
        assert below.tau_R_star is None and below.residual is None
        assert bracketed.tau_R_star == pytest.approx(-1.733, abs=5e-2)
        assert bracketed.residual > 0
        assert bracketed.iterations > 0

    def test_row_order_follows_input(self):
        tr = trace_ht_curve(
            0.2, 0.5, [1.3, 1.1], scan_points=3, bisect_tol=0.2,
            depth_forward=8, depth_backward=4,
        )
        assert [r.tau_L for r in tr.rows] == [1.3, 1.1]


class TestEscapeSurvey:
    def test_trapped_side_never_escapes(self):
        r = escape_survey(XI_A, n_seeds=100, n_iter=300, seed=3)
        assert r.fraction == 0.0
        assert (r.n_total, r.n_escaped) == (100, 0)

    def test_destroyed_side_always_escapes(self):
        r = escape_survey(Params(2.3, 0.2, -2.5, 0.5), n_seeds=100, n_iter=300, seed=3)
        assert r.fraction == 1.0
        assert r.n_escaped == 100

    def test_same_seed_replays(self):
        a = escape_survey(XI_A, n_seeds=50, n_iter=100, seed=7)
        b = escape_survey(XI_A, n_seeds=50, n_iter=100, seed=7)
        assert a == b

    def test_empty_and_invalid_inputs(self):
        z = escape_survey(XI_A, n_seeds=0)
        assert z.fraction == 0.0 and z.n_total == 0
        with pytest.raises(ValueError):
            escape_survey(XI_A, n_seeds=-1)


class TestPhiZeroBoundary:
    def test_root_at_slice_corner(self):
        root = phi_zero_boundary(0.2, 0.5, 2.176749816983884)
        assert root == pytest.approx(-1.5, abs=1e-6)

    def test_none_when_phi_keeps_one_sign(self):
        assert phi_zero_boundary(0.2, 0.5, 1.3) is None

    def test_none_below_saddle_condition(self):
        assert phi_zero_boundary(0.2, 0.5, 1.1) is None
