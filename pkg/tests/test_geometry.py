"""Polyline mapping with switching-line splits, cones and clearance."""
import math

import numpy as np
import pytest

from bcnflab.core import Params, Point, apply, eigen
from bcnflab.geometry import (
    Polygon,
    Polyline,
    Segment,
    chain_edges,
    clip_edges_to_box,
    cone_step,
    expansion_certificate,
    inverted_cone,
    line_intersection,
    longest_piece_bound,
    map_polyline,
    points_to_segments_distance,
    polyline_clearance,
    segment_line_intersection,
    split_at_sigma,
    standard_cone,
)

XI_A = Params(1.5, 0.2, -2.0, 0.5)


class TestContainers:
    def test_polyline_validation(self):
        with pytest.raises(ValueError):
            Polyline([[0.0, 0.0]])
        with pytest.raises(ValueError):
            Polyline([[0.0, 0.0], [0.0, 0.0]])
        with pytest.raises(ValueError):
            Polyline([[0.0, 0.0], [math.nan, 1.0]])

    def test_polyline_length(self):
        pl = Polyline([[0.0, 0.0], [3.0, 4.0], [3.0, 5.0]])
        assert pl.length() == pytest.approx(6.0)

    def test_polygon_contains_with_slack(self):
        tri = Polygon([(0.0, 0.0), (2.0, 0.0), (0.0, 2.0)])
        inside = tri.contains(np.array([[0.5, 0.5]]))[0]
        outside = tri.contains(np.array([[1.6, 1.6]]))[0]
        near = tri.contains(np.array([[1.02, 1.02]]), slack=0.1)[0]
        assert inside and not outside and near

    def test_segment_length(self):
        assert Segment(Point(0, 0), Point(3, 4)).length() == pytest.approx(5.0)


class TestSplitting:
    def test_crossing_segment_splits_at_switching_line(self):
        seg = Segment(Point(-1.0, 0.0), Point(1.0, 1.0))
        parts = split_at_sigma(seg)
        assert len(parts) == 2
        assert parts[0].b.x == pytest.approx(0.0, abs=1e-15)
        assert parts[0].b.y == pytest.approx(0.5, abs=1e-15)
        assert parts[1].a == parts[0].b

    def test_one_sided_segment_untouched(self):
        seg = Segment(Point(0.5, 0.0), Point(1.5, 1.0))
        assert split_at_sigma(seg) == [seg]

    def test_forward_image_vertex_lands_on_horizontal_axis(self):
        pl = Polyline([[-1.0, 0.2], [1.0, 0.2]])
        out = map_polyline(XI_A, pl, "forward")
        assert len(out) == 3
        assert out.vertices[1][1] == pytest.approx(0.0, abs=1e-15)
        assert out.vertices[0] == pytest.approx(np.array(apply(XI_A, (-1.0, 0.2))))
        assert out.vertices[2] == pytest.approx(np.array(apply(XI_A, (1.0, 0.2))))

    def test_backward_image_vertex_lands_on_switching_line(self):
        pl = Polyline([[0.5, -0.4], [0.5, 0.4]])
        out = map_polyline(XI_A, pl, "backward")
        assert len(out) == 3
        assert out.vertices[1][0] == pytest.approx(0.0, abs=1e-15)

    def test_collinear_interior_vertices_are_pruned(self):
        pl = Polyline([[1.0, 1.0], [2.0, 1.5], [3.0, 2.0]])
        out = map_polyline(XI_A, pl, "forward")
        assert len(out) == 2


class TestCones:
    def test_standard_cone_frozen(self):
        cone = standard_cone(XI_A)
        eL, eR = eigen(XI_A, "L"), eigen(XI_A, "R")
        assert cone.K[0] == pytest.approx(-eL.lambda_s, abs=1e-15)
        assert cone.K[1] == pytest.approx(abs(eR.lambda_s), abs=1e-15)
        assert cone.expansion == pytest.approx(eL.lambda_u, abs=1e-15)
        assert cone.expansion > 1.0

    def test_eigendirection_slopes_are_fixed_by_cone_step(self):
        eL = eigen(XI_A, "L")
        assert cone_step(XI_A, "L", eL.slope_u) == pytest.approx(eL.slope_u, rel=1e-12)
        assert cone_step(XI_A, "L", eL.slope_s) == pytest.approx(eL.slope_s, rel=1e-12)

    def test_certificates_hold_at_reference_point(self):
        cone = standard_cone(XI_A)
        inv = inverted_cone(XI_A)
        for side in ("L", "R"):
            assert expansion_certificate(XI_A, side, cone, cone.expansion)
            assert expansion_certificate(XI_A, side, inv, inv.expansion)

    def test_certificate_rejects_inflated_factor(self):
        cone = standard_cone(XI_A)
        assert not expansion_certificate(XI_A, "L", cone, cone.expansion * 1.5)

    def test_longest_piece_bound_frozen(self):
        assert longest_piece_bound(1.3520797289396147, 1.7071067811865475) == pytest.approx(
            0.7544961597920018, abs=1e-15
        )

    def test_longest_piece_bound_validation(self):
        with pytest.raises(ValueError):
            longest_piece_bound(0.0, 1.0)


class TestIntersections:
    def test_line_intersection(self):
        p = line_intersection(Point(0.0, 0.0), 1.0, Point(2.0, 0.0), -1.0)
        assert p == pytest.approx((1.0, 1.0))

    def test_parallel_lines_raise(self):
        with pytest.raises(ValueError):
            line_intersection(Point(0.0, 0.0), 0.5, Point(1.0, 1.0), 0.5)

    def test_segment_line_intersection_hit_and_miss(self):
        seg = Segment(Point(0.0, -1.0), Point(0.0, 1.0))
        hit = segment_line_intersection(seg, Point(-1.0, 0.0), 0.0)
        assert hit == pytest.approx((0.0, 0.0))
        miss = segment_line_intersection(seg, Point(-1.0, 5.0), 0.0)
        assert miss is None


class TestClearance:
    @staticmethod
    def _edges(verts):
        v = np.asarray(verts, dtype=float)
        return v[:-1], v[1:]

    def test_separated_polylines_report_distance_within_resolution(self):
        a = self._edges([[0.0, 0.0], [1.0, 0.0]])
        b = self._edges([[0.0, 0.25], [1.0, 0.25]])
        for res in (0.2, 0.05, 0.01):
            d, n = polyline_clearance(a, b, res)
            assert n == 0
            assert 0.25 - 1e-12 <= d <= 0.25 + res

    # crossing points below are chosen off the subdivision lattice: a
    # transversal hit exactly at a piece endpoint is not a proper crossing
    def test_crossing_polylines_report_zero_and_count(self):
        a = self._edges([[-1.0, 0.0], [1.0, 0.0]])
        b = self._edges([[0.13, -0.73], [0.13, 0.9], [0.61, -0.8]])
        d, n = polyline_clearance(a, b, 0.1)
        assert d == 0.0
        assert n == 2

    def test_first_crossing_only_lower_bound(self):
        a = self._edges([[-1.0, 0.0], [1.0, 0.0]])
        b = self._edges([[0.13, -0.73], [0.13, 0.9], [0.61, -0.8]])
        d, n = polyline_clearance(a, b, 0.1, first_crossing_only=True)
        assert d == 0.0
        assert 1 <= n <= 2

    def test_distance_against_brute_force(self):
        rng = np.random.default_rng(9)
        for _ in range(30):
            va = rng.uniform(-1, 1, size=(4, 2))
            vb = rng.uniform(2, 4, size=(4, 2))  # disjoint boxes: no crossing
            res = 0.05
            d, n = polyline_clearance(self._edges(va), self._edges(vb), res)
            assert n == 0
            # oracle: dense point sampling of one chain against the other;
            # both d and ref overestimate the true minimum, d by at most one
            # resolution and ref by at most one sample spacing
            t = np.linspace(0.0, 1.0, 200)[:, None]
            pts = np.concatenate([va[i] * (1 - t) + va[i + 1] * t for i in range(3)])
            ref = points_to_segments_distance(pts, vb[:-1], vb[1:]).min()
            spacing = max(np.linalg.norm(va[i + 1] - va[i]) for i in range(3)) / 199
            assert ref - spacing - 1e-9 <= d <= ref + res

    def test_clip_edges_to_box(self):
        a = np.array([[-2.0, 0.5], [5.0, 0.5], [0.2, 0.2]])
        b = np.array([[2.0, 0.5], [6.0, 0.5], [0.4, 0.4]])
        lo = np.array([0.0, 0.0])
        hi = np.array([1.0, 1.0])
        ca, cb = clip_edges_to_box(a, b, lo, hi)
        assert ca.shape == cb.shape
        assert ca.shape[0] == 2  # the all-outside edge is dropped
        assert np.all(ca >= lo - 1e-12) and np.all(ca <= hi + 1e-12)
        assert np.all(cb >= lo - 1e-12) and np.all(cb <= hi + 1e-12)

    def test_chain_edges_concatenates(self):
        a, b = chain_edges([np.zeros((3, 2)), np.ones((2, 2))])
        assert a.shape[0] == 3
        assert b.shape[0] == 3
