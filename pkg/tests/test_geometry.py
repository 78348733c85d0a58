# coding=utf-8
# Copyright (c) 2022, roadelev developers.  All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math
import os
import unittest

import numpy as np
from parameterized import parameterized

from roadelev.exceptions import ArgumentError, ConfigError, PointBehindCameraError
from roadelev.geometry import (
    CameraExtrinsics,
    CameraIntrinsics,
    Rig,
    backproject,
    default_extrinsics,
    ground_inverse_depth_step,
    load_rig,
    make_grid,
    mounted_extrinsics,
    pixel_rays,
    project_point,
    project_points,
    save_rig,
    stereo_rigs,
)
from roadelev.testing_utils import TestCasePlus, np_assert_close, set_seed

set_seed(42)

K = CameraIntrinsics(fx=100.0, fy=100.0, cx=48.0, cy=32.0, width=96, height=64)


def random_rotation(rng):
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


class TestMakeGrid(unittest.TestCase):
    @parameterized.expand([
        ("z_roi", (-0.2, 0.2), 0.01, 40),
        ("x_roi", (-1.0, 0.9), 0.03, 63),
        ("y_roi", (2.2, 7.1), 0.03, 163),
        ("single", (0.0, 1.0), 1.0, 1),
    ])
    def test_counts(self, _, axis_range, res, expected):
        grid = make_grid((axis_range, (0.0, 1.0), (0.0, 1.0)), (res, 1.0, 1.0))
        self.assertEqual(grid.N_x, expected)

    def test_single_cell_center(self):
        grid = make_grid(((0.0, 1.0), (0.0, 1.0), (0.0, 1.0)), (1.0, 1.0, 1.0))
        np_assert_close(grid.x_centers, [0.5])
        self.assertEqual(grid.shape, (1, 1, 1))

    def test_centers_stride(self):
        grid = make_grid(((-1.0, 0.9), (2.2, 7.1), (-0.2, 0.2)), (0.03, 0.03, 0.01))
        for centers, lo, res in ((grid.x_centers, -1.0, 0.03), (grid.y_centers, 2.2, 0.03),
                                 (grid.z_centers, -0.2, 0.01)):
            self.assertAlmostEqual(centers[0], lo + 0.5 * res, places=12)
            np_assert_close(np.diff(centers), res, atol=1e-12)
        self.assertEqual(grid.voxel_centers().shape, (63, 163, 40, 3))

    def test_degenerate(self):
        with self.assertRaises(ArgumentError):
            make_grid(((1.0, 1.0), (0.0, 1.0), (0.0, 1.0)), (0.1, 0.1, 0.1))
        with self.assertRaises(ArgumentError):
            make_grid(((0.0, 1.0), (0.0, 1.0), (0.0, 1.0)), (0.1, 0.0, 0.1))


class TestProjection(unittest.TestCase):
    def test_optical_axis(self):
        p = project_point((0.0, 0.0, 5.0), K, CameraExtrinsics())
        self.assertEqual(tuple(p), (48.0, 32.0, 5.0))

    def test_hand_example(self):
        p = project_point((1.0, 0.0, 5.0), K, CameraExtrinsics())
        self.assertAlmostEqual(p.u, 68.0, places=12)
        self.assertAlmostEqual(p.v, 32.0, places=12)
        self.assertAlmostEqual(p.d, 5.0, places=12)

    def test_behind_camera(self):
        with self.assertRaises(PointBehindCameraError):
            project_point((1.0, 1.0, 0.0), K, CameraExtrinsics())
        with self.assertRaises(ArgumentError):
            project_point((0.0, 0.0, -2.0), K, CameraExtrinsics())

    def test_level_rig_looks_down_the_road(self):
        p = project_point((0.0, 4.0, -0.5), K, default_extrinsics())
        self.assertAlmostEqual(p.d, 4.0, places=12)
        self.assertAlmostEqual(p.u, 48.0, places=12)
        self.assertGreater(p.v, 32.0)

    def test_round_trip(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            T = CameraExtrinsics(random_rotation(rng), rng.uniform(-2, 2, size=3))
            p_cam = np.array([rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0.5, 20)])
            p_world = T.to_world(p_cam)
            u, v, d = project_point(p_world, K, T)
            np_assert_close(backproject(u, v, d, K, T), p_world, atol=1e-4)

    def test_scale_consistency(self):
        T = mounted_extrinsics(1.0, math.radians(12.0))
        p_cam = np.array([0.3, 0.4, 3.0])
        base = project_point(T.to_world(p_cam), K, T)
        for lam in (0.5, 2.0, 7.0):
            p = project_point(T.to_world(lam * p_cam), K, T)
            self.assertAlmostEqual(p.u, base.u, places=9)
            self.assertAlmostEqual(p.v, base.v, places=9)
            self.assertAlmostEqual(p.d, lam * base.d, places=9)

    def test_vectorized_matches_scalar(self):
        T = mounted_extrinsics(1.2, 0.1)
        points = np.random.uniform(-1, 1, size=(20, 3)) + np.array([0.0, 5.0, 0.0])
        u, v, d = project_points(points, K, T)
        for i, p in enumerate(points):
            q = project_point(p, K, T)
            np_assert_close([u[i], v[i], d[i]], list(q), atol=1e-9)

    def test_pixel_rays_are_depth_scaled(self):
        T = mounted_extrinsics(1.0, math.radians(12.0))
        u, v = np.array([10.5, 70.0]), np.array([50.0, 3.0])
        rays = pixel_rays(K, T, u, v)
        points = T.camera_center + 2.5 * rays
        pu, pv, pd = project_points(points, K, T)
        np_assert_close(pd, 2.5, atol=1e-12)
        np_assert_close(pu, u, atol=1e-9)
        np_assert_close(pv, v, atol=1e-9)


class TestCameraTypes(unittest.TestCase):
    def test_intrinsics_invariants(self):
        with self.assertRaises(ArgumentError):
            CameraIntrinsics(0.0, 1.0, 1.0, 1.0, 4, 4)
        with self.assertRaises(ArgumentError):
            CameraIntrinsics(1.0, 1.0, 4.0, 1.0, 4, 4)

    def test_matrix_matches_projection(self):
        K = CameraIntrinsics(100.0, 90.0, 48.0, 32.0, 96, 64)
        p = np.array([1.0, -0.5, 4.0])
        h = K.matrix @ p
        u, v, d = project_points(p[None], K, CameraExtrinsics(np.eye(3), np.zeros(3)))
        np_assert_close([u[0], v[0], d[0]], [h[0] / h[2], h[1] / h[2], 4.0], atol=1e-12)
        np_assert_close([u[0], v[0]], [73.0, 20.75], atol=1e-12)

    def test_rotation_must_be_proper(self):
        with self.assertRaises(ArgumentError):
            CameraExtrinsics(np.diag([1.0, 1.0, -1.0]), np.zeros(3))
        with self.assertRaises(ArgumentError):
            CameraExtrinsics(2.0 * np.eye(3), np.zeros(3))

    def test_mounted_camera_center(self):
        T = mounted_extrinsics(1.5, 0.2, lateral_offset=0.3)
        np_assert_close(T.camera_center, [0.3, 0.0, 1.5], atol=1e-12)
        # optical axis points forward and down
        forward = T.rotation[2]
        self.assertGreater(forward[1], 0)
        self.assertLess(forward[2], 0)

    def test_stereo_rigs_are_rectified(self):
        left, right = stereo_rigs(K, 1.0, 0.2, 0.12)
        np_assert_close(left.extrinsics.rotation, right.extrinsics.rotation, atol=0)
        np_assert_close(right.extrinsics.camera_center - left.extrinsics.camera_center, [0.12, 0, 0], atol=1e-12)
        p = np.array([0.1, 4.0, 0.05])
        pl = project_point(p, K, left.extrinsics)
        pr = project_point(p, K, right.extrinsics)
        self.assertAlmostEqual(pl.v, pr.v, places=9)
        self.assertGreater(pl.u, pr.u)
        with self.assertRaises(ArgumentError):
            stereo_rigs(K, 1.0, 0.2, 0.0)

    def test_ground_inverse_depth_step(self):
        rig = Rig(K, mounted_extrinsics(1.2, math.radians(15.0), lateral_offset=0.1))
        T = rig.extrinsics
        u = np.array([20.0, 20.0, 70.0])
        v = np.array([40.0, 48.0, 56.0])
        rays = pixel_rays(K, T, u, v)
        # depth-scaled rays reach z = 0 at t = -h / r_z, and t is the camera depth
        inverse = -rays[:, 2] / 1.2
        step = ground_inverse_depth_step(rig, 8)
        np_assert_close(np.diff(inverse), step, atol=1e-12)
        self.assertAlmostEqual(step, 8 * math.cos(math.radians(15.0)) / (100.0 * 1.2), places=12)
        with self.assertRaises(ArgumentError):
            ground_inverse_depth_step(Rig(K, default_extrinsics()), 4)


class TestRigFile(TestCasePlus):
    def test_save_load(self):
        path = os.path.join(self.get_auto_remove_tmp_dir(), "rig.json")
        rig = Rig(K, mounted_extrinsics(1.0, 0.2, 0.06))
        save_rig(path, rig)
        loaded = load_rig(path)
        self.assertEqual(loaded.intrinsics, K)
        np_assert_close(loaded.extrinsics.rotation, rig.extrinsics.rotation, atol=0)
        np_assert_close(loaded.extrinsics.translation, rig.extrinsics.translation, atol=0)

    def test_errors(self):
        tmp_dir = self.get_auto_remove_tmp_dir()
        with self.assertRaises(ConfigError):
            load_rig(os.path.join(tmp_dir, "missing.json"))
        path = os.path.join(tmp_dir, "bad.json")
        with open(path, "w") as f:
            f.write('{"intrinsics": {"fx": 1}}')
        with self.assertRaises(ConfigError):
            load_rig(path)
