import math

import numpy as np
import pytest

from moscolab import errors
from moscolab.geomkit import (
    CompactScene,
    build_compact_set,
    distance_to_set,
    hausdorff_complementary_distance,
    hausdorff_distance,
    length_measure,
    symmetric_difference_area,
)

from conftest import centered_crack
from oracles import oracle_hausdorff, oracle_hausdorff_complementary


def tiny_dot(x, y, box_radius=6.0):
    eps = 1e-9
    return build_compact_set({"box_radius": box_radius, "cracks": [[[x, y], [x + eps, y]]]})


class TestBuild:
    def test_unit_segment(self, unit_segment):
        assert len(unit_segment.cracks) == 1
        assert len(unit_segment.solids) == 0

    def test_out_of_box(self):
        with pytest.raises(errors.OutOfBox):
            build_compact_set({"box_radius": 2.0, "cracks": [[[5.0, 0.0], [0.0, 0.0]]]})

    def test_self_crossing_polyline(self):
        with pytest.raises(errors.MalformedSpec):
            build_compact_set(
                {
                    "box_radius": 2.0,
                    "cracks": [[[0.0, 0.0], [1.0, 0.0], [0.5, 1.0], [0.5, -1.0]]],
                }
            )

    def test_zero_length_segment(self):
        with pytest.raises(errors.DegenerateSegment):
            build_compact_set({"box_radius": 2.0, "cracks": [[[0.0, 0.0], [0.0, 0.0]]]})

    def test_missing_vertices(self):
        with pytest.raises(errors.MalformedSpec):
            build_compact_set({"box_radius": 2.0, "cracks": [[[0.0, 0.0]]]})

    def test_nonfinite_vertex(self):
        with pytest.raises(errors.MalformedSpec):
            build_compact_set({"box_radius": 2.0, "cracks": [[[0.0, 0.0], [np.nan, 1.0]]]})

    def test_polygon_reoriented_positive(self):
        scene = build_compact_set(
            {"box_radius": 2.0, "solids": [[[0, 0], [0, 1], [1, 1], [1, 0]]]}
        )
        ring = scene.solids[0]
        x, y = ring[:, 0], ring[:, 1]
        assert 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y) > 0

    def test_non_simple_polygon(self):
        with pytest.raises(errors.MalformedSpec):
            build_compact_set(
                {"box_radius": 2.0, "solids": [[[0, 0], [1, 1], [1, 0], [0, 1]]]}
            )


class TestHausdorff:
    def test_two_distant_dots(self):
        k1, k2 = tiny_dot(0, 0), tiny_dot(3, 4)
        got = hausdorff_distance(k1, k2, tol=1e-6)
        assert abs(got.value - 5.0) <= got.error_bound + 1e-8

    def test_identity(self, unit_segment):
        got = hausdorff_distance(unit_segment, unit_segment, tol=1e-6)
        assert got.value <= got.error_bound + 1e-12

    def test_parallel_offset(self, unit_segment, offset_segment):
        got = hausdorff_distance(unit_segment, offset_segment, tol=1e-6)
        assert abs(got.value - 1.0) <= got.error_bound

    def test_symmetry_exact(self, unit_segment, unit_square_solid):
        a = hausdorff_distance(unit_segment, unit_square_solid, tol=1e-5)
        b = hausdorff_distance(unit_square_solid, unit_segment, tol=1e-5)
        assert a.value == b.value

    def test_matches_sampling_oracle(self, unit_segment, offset_segment, unit_square_solid):
        scenes = [unit_segment, offset_segment, unit_square_solid, centered_crack(0.4)]
        for i in range(len(scenes)):
            for j in range(i + 1, len(scenes)):
                got = hausdorff_distance(scenes[i], scenes[j], tol=1e-4)
                want = oracle_hausdorff(scenes[i], scenes[j], ds=2e-3)
                assert abs(got.value - want) <= got.error_bound + 2e-3

    def test_triangle_inequality(self, unit_segment, offset_segment, unit_square_solid):
        tol = 1e-5
        scenes = [unit_segment, offset_segment, unit_square_solid]
        d = {}
        for i in range(3):
            for j in range(3):
                if i != j:
                    d[i, j] = hausdorff_distance(scenes[i], scenes[j], tol=tol).value
        for i, j, k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
            assert d[i, j] <= d[i, k] + d[k, j] + 3 * tol

    def test_monotone_subset(self):
        whole = build_compact_set({"box_radius": 2.0, "cracks": [[[0, 0], [1, 0]]]})
        part = build_compact_set({"box_radius": 2.0, "cracks": [[[0.2, 0.0], [0.7, 0.0]]]})
        from moscolab.geomkit import _certified_sup, _distance_field, _sup_items

        lb, ub = _certified_sup(_sup_items(part), _distance_field(whole), 1e-9)
        assert ub <= 1e-9 + 1e-12

    def test_empty_scene_rejected(self, unit_segment):
        empty = CompactScene(2.0)
        with pytest.raises(errors.EmptyScene):
            hausdorff_distance(unit_segment, empty, tol=1e-6)


class TestHausdorffComplementary:
    def test_identical(self, unit_segment):
        got = hausdorff_complementary_distance(unit_segment, unit_segment, 3.0, tol=1e-6)
        assert got.value <= got.error_bound + 1e-12

    def test_rotated_crack(self):
        # frozen from the dense-sampling oracle (ds = 1e-4): rotating a unit
        # crack about its centre by theta moves the tips by sin(theta)/2
        theta = 0.3
        k0 = centered_crack(0.0)
        k1 = centered_crack(theta)
        got = hausdorff_complementary_distance(k0, k1, 3.0, tol=1e-5)
        assert abs(got.value - 0.5 * math.sin(theta)) <= got.error_bound + 2e-4
        want = oracle_hausdorff_complementary(k0, k1, 3.0, ds=1e-4)
        assert abs(got.value - want) <= got.error_bound + 2e-4

    def test_far_extra_crack(self, unit_segment):
        with_extra = build_compact_set(
            {"box_radius": 2.0, "cracks": [[[0, 0], [1, 0]], [[0.0, 1.2], [1.0, 1.2]]]}
        )
        # the extra crack keeps distance min(1.2 to the segment, 0.8 to the box side)
        got = hausdorff_complementary_distance(unit_segment, with_extra, 3.0, tol=1e-5)
        assert got.value >= 0.8 - 1e-5
        want = oracle_hausdorff_complementary(unit_segment, with_extra, 3.0, ds=2e-3)
        assert abs(got.value - want) <= got.error_bound + 4e-3


class TestSymmetricDifference:
    def test_identical(self, unit_square_solid):
        got = symmetric_difference_area(unit_square_solid, unit_square_solid, 1 / 64)
        assert got.value == 0.0

    def test_shifted_squares(self):
        sq1 = build_compact_set(
            {"box_radius": 2.0, "solids": [[[0, 0], [1, 0], [1, 1], [0, 1]]]}
        )
        sq2 = build_compact_set(
            {"box_radius": 2.0, "solids": [[[0.5, 0], [1.5, 0], [1.5, 1], [0.5, 1]]]}
        )
        got = symmetric_difference_area(sq1, sq2, 1 / 64)
        assert abs(got.value - 1.0) <= got.error_bound

    def test_crack_has_zero_area(self, unit_segment):
        bare = CompactScene(2.0)
        got = symmetric_difference_area(unit_segment, bare, 1 / 64)
        assert got.value == 0.0

    def test_symmetric_exactly(self, unit_square_solid, unit_segment):
        a = symmetric_difference_area(unit_square_solid, unit_segment, 1 / 32)
        b = symmetric_difference_area(unit_segment, unit_square_solid, 1 / 32)
        assert a.value == b.value


class TestDistanceToSet:
    def test_polygon_apothem(self):
        th = np.linspace(0, 2 * np.pi, 361)[:-1]
        ring = np.column_stack([np.cos(th), np.sin(th)])
        scene = build_compact_set({"box_radius": 2.0, "cracks": [ring.tolist()]})
        # crack ring, so the centre sees the apothem cos(pi/360)
        d = distance_to_set((0.0, 0.0), scene)
        assert abs(d - 1.0) <= 4e-5
        assert abs(d - math.cos(math.pi / 360)) <= 1e-12

    def test_point_on_set(self, unit_segment):
        assert distance_to_set((0.5, 0.0), unit_segment) == 0.0

    def test_point_past_endpoint(self, unit_segment):
        assert distance_to_set((2.0, 0.0), unit_segment) == 1.0

    def test_inside_solid_is_zero(self, unit_square_solid):
        assert distance_to_set((0.5, 0.5), unit_square_solid) == 0.0

    def test_empty(self):
        with pytest.raises(errors.EmptyScene):
            distance_to_set((0, 0), CompactScene(1.0))


class TestLengthMeasure:
    def test_plus_sign(self):
        arms = [
            [[0, 0], [1, 0]],
            [[0, 0], [-1, 0]],
            [[0, 0], [0, 1]],
            [[0, 0], [0, -1]],
        ]
        scene = build_compact_set({"box_radius": 2.0, "cracks": arms})
        assert length_measure(scene) == pytest.approx(4.0, abs=1e-12)

    def test_empty(self):
        assert length_measure(CompactScene(1.0)) == 0.0

    def test_unit_square_perimeter(self, unit_square_solid):
        assert length_measure(unit_square_solid) == pytest.approx(4.0, abs=1e-12)

    def test_collinear_overlap_counted_once(self):
        scene = build_compact_set(
            {"box_radius": 2.0, "cracks": [[[0, 0], [1, 0]], [[0.5, 0], [1.5, 0]]]}
        )
        assert length_measure(scene) == pytest.approx(1.5, abs=1e-12)


class TestMonotoniaFixture:
    def test_boundary_limit_sandwich(self):
        # solid squares shrinking to the unit square: the boundaries converge
        # to a set squeezed between the limit boundary and the limit solid
        tol = 1e-3
        sides = [1 + 1 / n for n in range(2, 6)]

        def solid(side):
            h = side / 2
            return build_compact_set(
                {"box_radius": 2.0, "solids": [[[-h, -h], [h, -h], [h, h], [-h, h]]]}
            )

        def boundary(side):
            h = side / 2
            return build_compact_set(
                {
                    "box_radius": 2.0,
                    "cracks": [[[-h, -h], [h, -h], [h, h], [-h, h], [-h, -h]]],
                }
            )

        limit_solid = solid(1.0)
        limit_bdry = boundary(1.0)
        d_solids = [hausdorff_distance(solid(s), limit_solid, tol).value for s in sides]
        d_bdrys = [hausdorff_distance(boundary(s), limit_bdry, tol).value for s in sides]
        assert all(a >= b - 3 * tol for a, b in zip(d_solids, d_solids[1:]))
        assert all(a >= b - 3 * tol for a, b in zip(d_bdrys, d_bdrys[1:]))
        # every point of the limit boundary is close to the boundary limit,
        # and the boundary limit sits inside the limit solid
        tilde_k = boundary(sides[-1])
        from moscolab.geomkit import _certified_sup, _distance_field, _sup_items

        _, ub = _certified_sup(_sup_items(limit_bdry), _distance_field(tilde_k), tol)
        assert ub <= d_bdrys[-1] + 3 * tol
        _, ub2 = _certified_sup(_sup_items(tilde_k), _distance_field(limit_solid), tol)
        assert ub2 <= d_solids[-1] + 3 * tol
