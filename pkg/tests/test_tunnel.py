import numpy as np
import pytest

from fuzzyblock.kernel import (
    CLASS_INFINITE,
    CLASS_REMOVABLE,
    JointPlane,
    Orientation,
    TunnelSection,
    all_codes,
    enumerate_tunnel_blocks,
)

SQUARE = TunnelSection(((-2, -2), (2, -2), (2, 2), (-2, 2)))


def roof_tetra_joints():
    return [JointPlane(f"J{i + 1}", Orientation(60, dd), 20.0) for i, dd in enumerate((0, 120, 240))]


class TestTunnelSection:
    def test_needs_three_vertices(self):
        with pytest.raises(ValueError):
            TunnelSection(((0, 0), (1, 0)))

    def test_convexity_enforced(self):
        with pytest.raises(ValueError):
            TunnelSection(((0, 0), (2, 0), (1, 1), (2, 2), (0, 2)))

    def test_clockwise_input_reordered(self):
        cw = TunnelSection(tuple(reversed(SQUARE.vertices)))
        assert {f.angle_deg for f in cw.facets()} == {f.angle_deg for f in SQUARE.facets()}

    def test_facet_normals_point_into_rock(self):
        for facet in SQUARE.facets():
            # the normal at the roof points up, at the floor down
            if facet.angle_deg == pytest.approx(90.0):
                assert np.allclose(facet.inward_normal, [0, 0, 1])
            if facet.angle_deg == pytest.approx(270.0):
                assert np.allclose(facet.inward_normal, [0, 0, -1])

    def test_axis_trend(self):
        t = TunnelSection(SQUARE.vertices, axis_trend_deg=90.0)
        assert np.allclose(t.axis, [1, 0, 0], atol=1e-12)
        assert np.allclose(t.u_hat, [0, -1, 0], atol=1e-12)

    def test_facet_at_angle(self):
        facet, point = SQUARE.facet_at_angle(90.0)
        assert facet.angle_deg == pytest.approx(90.0)
        assert point[2] == pytest.approx(2.0)
        facet, _ = SQUARE.facet_at_angle(268.0)
        assert facet.angle_deg == pytest.approx(270.0)

    def test_codes_lexicographic(self):
        assert all_codes(2) == ["LL", "LU", "UL", "UU"]


class TestEnumerateTunnelBlocks:
    def test_record_count(self):
        records = enumerate_tunnel_blocks(roof_tetra_joints(), SQUARE)
        assert len(records) == 4 * 8

    def test_single_joint_counts(self):
        joints = [JointPlane("J1", Orientation(45, 90), 20.0)]
        records = enumerate_tunnel_blocks(joints, SQUARE)
        assert len(records) == 4 * 2

    def test_zero_joints_one_infinite_record_per_facet(self):
        records = enumerate_tunnel_blocks([], SQUARE)
        assert len(records) == 4
        assert all(r.classification == CLASS_INFINITE for r in records)
        assert all(r.code == "" for r in records)

    def test_too_many_joints_rejected(self):
        joints = [JointPlane(f"J{k}", Orientation(30, k * 10.0), 20.0) for k in range(9)]
        with pytest.raises(ValueError):
            enumerate_tunnel_blocks(joints, SQUARE)

    def test_roof_block_falls_with_zero_sf(self):
        records = enumerate_tunnel_blocks(roof_tetra_joints(), SQUARE)
        roof = [
            r
            for r in records
            if r.facet_angle_deg == pytest.approx(90.0) and r.classification == CLASS_REMOVABLE
        ]
        assert len(roof) == 1
        rec = roof[0]
        assert rec.code == "LLL"
        assert rec.mode_label == "falling"
        assert rec.safety_factor == 0.0
        assert rec.volume_m3 is not None and rec.volume_m3 > 0.0
        assert rec.error is None

    def test_every_record_classified(self):
        records = enumerate_tunnel_blocks(roof_tetra_joints(), SQUARE)
        for rec in records:
            assert rec.classification in (CLASS_INFINITE, CLASS_REMOVABLE, "tapered")
            if rec.classification == CLASS_REMOVABLE:
                assert rec.safety_factor is not None
            else:
                assert rec.safety_factor is None

    def test_deterministic_ordering(self):
        records = enumerate_tunnel_blocks(roof_tetra_joints(), SQUARE)
        keys = [(r.facet_index, r.code) for r in records]
        assert keys == sorted(keys)

    def test_repeatable(self):
        a = enumerate_tunnel_blocks(roof_tetra_joints(), SQUARE)
        b = enumerate_tunnel_blocks(roof_tetra_joints(), SQUARE)
        for ra, rb in zip(a, b):
            assert ra.classification == rb.classification
            assert ra.safety_factor == rb.safety_factor
            assert ra.volume_m3 == rb.volume_m3

    def test_rotated_axis_same_roof_physics(self):
        # a tunnel running east instead of north still drops its roof block:
        # the joint set must rotate with the axis for the same relative setup
        rotated = TunnelSection(SQUARE.vertices, axis_trend_deg=90.0)
        joints = [
            JointPlane(f"J{i + 1}", Orientation(60, (dd + 90.0) % 360.0), 20.0)
            for i, dd in enumerate((0, 120, 240))
        ]
        records = enumerate_tunnel_blocks(joints, rotated)
        roof = [
            r
            for r in records
            if r.facet_angle_deg == pytest.approx(90.0) and r.classification == CLASS_REMOVABLE
        ]
        assert len(roof) == 1
        assert roof[0].mode_label == "falling"
        assert roof[0].volume_m3 == pytest.approx(0.5773502691896258, abs=1e-9)
