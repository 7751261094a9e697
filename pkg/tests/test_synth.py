"""Synthetic scene generator tests.

The generator's whole value is that every frame ships with an exact
analytic answer key (true floor plane + floor mask), so most tests here
check rendered geometry directly against that key.
"""

from __future__ import annotations

import numpy as np
import pytest

from conftest import (flat_exact_scene, forward_scene, make_intrinsics,
                      rim_scene, wall_scene)
from tofplane import (CameraPose, ClutterBox, PointCloud, SceneSpec,
                      curvature_gradient, depth_to_pointcloud, render_scene)


def floor_cloud(img, mask):
    """Unprojected points of the floor pixels only."""
    cloud = depth_to_pointcloud(img)
    u, v = cloud.pixel_index[:, 0], cloud.pixel_index[:, 1]
    return cloud.take(np.flatnonzero(mask[v, u]))


class TestSceneSpecValidation:
    @pytest.mark.parametrize("kwargs", [
        dict(bow_amplitude=-0.1),
        dict(noise_sigma=-0.001),
        dict(extent=0.0),
        dict(extent=-2.0),
        dict(bow_profile="cubic"),
    ])
    def test_rejects_bad_parameters(self, kwargs):
        with pytest.raises(ValueError):
            SceneSpec(**kwargs)

    def test_dict_roundtrip(self):
        spec = SceneSpec(floor_height=0.1, bow_amplitude=0.05,
                         bow_profile="quartic", noise_sigma=0.002,
                         extent=3.0,
                         clutter=(ClutterBox((0, 1, 0), (1, 2, 1)),),
                         seed=42)
        assert SceneSpec.from_dict(spec.to_dict()) == spec

    def test_box_corners_must_be_ordered(self):
        with pytest.raises(ValueError):
            ClutterBox((0, 0, 0), (1, 0, 1))


class TestCameraPose:
    @pytest.mark.parametrize("pitch,yaw", [
        (0.0, 0.0), (12.0, 0.0), (90.0, 0.0), (45.0, 30.0), (90.0, 120.0),
    ])
    def test_rotation_is_orthonormal(self, pitch, yaw):
        rot = CameraPose((0, 0, 1), pitch, yaw).rotation_c2w()
        np.testing.assert_allclose(rot @ rot.T, np.eye(3), atol=1e-12)
        assert np.linalg.det(rot) == pytest.approx(1.0, abs=1e-12)

    def test_straight_down_looks_along_negative_z(self):
        rot = CameraPose((0, 0, 2), 90.0).rotation_c2w()
        # camera +Z (view direction) in world coordinates:
        np.testing.assert_allclose(rot @ [0, 0, 1], [0, 0, -1], atol=1e-12)

    def test_dict_roundtrip(self):
        pose = CameraPose((1.0, -2.0, 3.0), 25.0, yaw_deg=40.0)
        assert CameraPose.from_dict(pose.to_dict()) == pose


class TestRenderScene:
    def test_flat_floor_at_exact_unit_height_is_coplanar(self):
        img, plane, mask, _, _ = flat_exact_scene(height=2.0)
        assert mask.sum() > 5000
        res = plane.signed_distance(floor_cloud(img, mask).points)
        assert np.abs(res).max() == 0.0  # quantization is exact here

    def test_flat_floor_stays_within_quantization(self):
        # noiseless but non-integer height: residual is pure quantization
        img, plane, mask, _, _ = forward_scene(seed=3, bow=0.0, sigma=0.0,
                                               height=0.8123)
        res = plane.signed_distance(floor_cloud(img, mask).points)
        assert np.abs(res).max() <= 0.001  # one depth unit

    def test_curled_floor_is_strongly_one_sided(self):
        # amplitude 0.08 over a 4 m extent: measured against the analytic
        # plane, the absolute mass above dominates heavily.
        img, plane, mask, _, _ = forward_scene(seed=1, bow=0.08, sigma=0.005)
        grad = curvature_gradient(floor_cloud(img, mask), plane)
        assert grad > 0.25

    def test_rendering_is_deterministic(self):
        a = rim_scene(seed=9)
        b = rim_scene(seed=9)
        np.testing.assert_array_equal(a[0].data, b[0].data)
        np.testing.assert_array_equal(a[2], b[2])
        c = rim_scene(seed=10)
        assert not np.array_equal(a[0].data, c[0].data)

    @pytest.mark.parametrize("profile", ["quadratic", "quartic"])
    def test_floor_deviation_is_bounded(self, profile):
        amp, sigma = 0.07, 0.004
        img, plane, mask, _, _ = forward_scene(seed=5, bow=amp, sigma=sigma,
                                               profile=profile)
        res = plane.signed_distance(floor_cloud(img, mask).points)
        # the returned normal points into the floor, so curl (toward the
        # camera) reads as negative distance
        assert res.min() >= -(amp + 4 * sigma + 0.002)  # + quantization
        assert res.max() <= 4 * sigma + 0.002

    def test_quartic_profile_curls_later_than_quadratic(self):
        quad = forward_scene(seed=7, bow=0.08, sigma=0.0)
        quart = forward_scene(seed=7, bow=0.08, sigma=0.0,
                              profile="quartic")
        res_quad = quad[1].signed_distance(floor_cloud(quad[0],
                                                       quad[2]).points)
        res_quart = quart[1].signed_distance(floor_cloud(quart[0],
                                                         quart[2]).points)
        # same peak amplitude at the rim, but less lifted mass overall
        # (curl reads negative under the into-the-floor normal)
        assert abs(res_quart.sum()) < abs(res_quad.sum())

    def test_clutter_pixels_unaffected_by_bow(self):
        box = ClutterBox((-0.3, 1.0, 0.0), (0.3, 1.3, 0.4))
        flat = forward_scene(seed=11, bow=0.0, sigma=0.003, clutter=(box,))
        bowed = forward_scene(seed=11, bow=0.1, sigma=0.003, clutter=(box,))
        clutter_flat = flat[0].valid_mask & ~flat[2]
        clutter_bowed = bowed[0].valid_mask & ~bowed[2]
        assert clutter_flat.sum() > 100
        np.testing.assert_array_equal(clutter_flat, clutter_bowed)
        np.testing.assert_array_equal(flat[0].data[clutter_flat],
                                      bowed[0].data[clutter_bowed])

    def test_clutter_occludes_floor(self):
        box = ClutterBox((-0.3, 1.0, 0.0), (0.3, 1.3, 0.4))
        with_box = forward_scene(seed=11, bow=0.0, sigma=0.0, clutter=(box,))
        without = forward_scene(seed=11, bow=0.0, sigma=0.0)
        assert with_box[2].sum() < without[2].sum()
        # the box reads nearer than the floor it hides
        stolen = without[2] & ~with_box[2] & with_box[0].valid_mask
        assert (with_box[0].data[stolen] < without[0].data[stolen]).all()

    def test_rays_missing_everything_read_zero(self):
        # a small floor far below leaves the image top empty
        intr = make_intrinsics()
        pose = CameraPose((0, 0, 3.0), pitch_deg=30.0)
        spec = SceneSpec(extent=1.0, seed=0)
        img, _, mask = render_scene(spec, intr, pose)
        assert not img.valid_mask[0].any()  # top row sees sky
        np.testing.assert_array_equal(img.valid_mask, mask)  # no clutter

    def test_wall_only_scene_has_no_floor_pixels(self):
        img, _, mask, _, _ = wall_scene()
        assert mask.sum() == 0
        assert img.valid_count() > 1000  # the wall itself is visible

    def test_camera_below_floor_is_rejected(self):
        intr = make_intrinsics()
        spec = SceneSpec(floor_height=1.0)
        with pytest.raises(ValueError, match="camera below floor"):
            render_scene(spec, intr, CameraPose((0, 0, 0.5), 90.0))

    def test_returned_plane_matches_camera_geometry(self):
        # straight-down at height h: floor normal is camera +Z, offset -h
        img, plane, mask, _, _ = flat_exact_scene(height=2.0)
        np.testing.assert_allclose(plane.normal, [0, 0, 1], atol=1e-12)
        assert plane.d == pytest.approx(-2.0, abs=1e-12)

    def test_mask_pixels_are_valid_depths(self):
        img, _, mask, _, _ = rim_scene(seed=13)
        assert (img.data[mask] > 0).all()
