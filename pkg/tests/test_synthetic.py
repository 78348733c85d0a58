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

from roadelev.config import load_config
from roadelev.data import (
    DepthRender,
    PrimitiveSpec,
    SceneParams,
    SceneSpec,
    cast_rays,
    flat_scene,
    gen_scene,
    gt_elevation_map,
    load_scene,
    oracle_depth_distributions,
    pixel_grid,
    render_depth,
    render_features,
    render_scene,
    save_scene,
    synthetic_suite,
)
from roadelev.exceptions import ArgumentError, ConfigError, DataError
from roadelev.geometry import Rig, ground_inverse_depth_step, mounted_extrinsics, pixel_rays
from roadelev.testing_utils import TestCasePlus, np_assert_close, np_assert_equal


class TestSceneSpec(unittest.TestCase):
    def setUp(self):
        self.config = load_config("desk")
        self.params = SceneParams.from_config(self.config, num_potholes=1, num_cracks=1, max_tilt=0.02)

    def test_generator_is_deterministic(self):
        self.assertEqual(gen_scene(7, self.params).to_dict(), gen_scene(7, self.params).to_dict())
        self.assertNotEqual(gen_scene(7, self.params).to_dict(), gen_scene(8, self.params).to_dict())

    def test_primitives_follow_params(self):
        scene = gen_scene(3, self.params)
        kinds = [p.kind for p in scene.primitives]
        self.assertEqual(kinds, ["bump", "bump", "bump", "pothole", "crack"])
        for p in scene.primitives:
            self.assertTrue(-1.0 <= p.center[0] <= 0.9 and 2.2 <= p.center[1] <= 7.1)
            self.assertTrue(0.25 <= p.radius <= 0.5)
            self.assertTrue(0.025 <= abs(p.amplitude) <= 0.05)
            self.assertEqual(p.amplitude > 0, p.kind == "bump")
        self.assertTrue(abs(scene.tilt_pitch) <= 0.02 and abs(scene.tilt_roll) <= 0.02)

    def test_elevation_bound(self):
        scene = gen_scene(11, self.params)
        xs, ys = np.meshgrid(np.linspace(-3, 3, 121), np.linspace(0, 12, 241), indexing="ij")
        self.assertLessEqual(float(np.abs(scene.elevation(xs, ys)).max()), scene.elevation_bound())

    def test_gradient_matches_finite_differences(self):
        scene = gen_scene(5, self.params)
        rng = np.random.default_rng(0)
        x = rng.uniform(-1.0, 0.9, 500)
        y = rng.uniform(2.2, 7.1, 500)
        gx, gy = scene.gradient(x, y)
        h = 1e-6
        fd_x = (scene.elevation(x + h, y) - scene.elevation(x - h, y)) / (2 * h)
        fd_y = (scene.elevation(x, y + h) - scene.elevation(x, y - h)) / (2 * h)
        np_assert_close(gx, fd_x, atol=1e-4)
        np_assert_close(gy, fd_y, atol=1e-4)

    @parameterized.expand([("bump",), ("pothole",), ("crack",)])
    def test_primitive_is_smooth_at_its_rim(self, kind):
        p = PrimitiveSpec(kind, (0.0, 5.0), 0.4, 0.05)
        eps = 1e-6
        for x, y in ((0.4 - eps, 5.0), (0.4 + eps, 5.0)):
            self.assertAlmostEqual(float(p.elevation(x, y)), 0.0, places=9)
            gx, gy = p.gradient(np.array(x), np.array(y))
            self.assertAlmostEqual(float(gx), 0.0, places=5)
            self.assertAlmostEqual(float(gy), 0.0, places=5)

    def test_normals_are_unit_and_upward(self):
        scene = gen_scene(2, self.params)
        n = scene.normals(np.linspace(-1, 1, 50), np.linspace(3, 6, 50))
        np_assert_close(np.linalg.norm(n, axis=-1), 1.0, atol=1e-12)
        self.assertTrue(np.all(n[:, 2] > 0))

    def test_serialization(self):
        scene = gen_scene(4, self.params)
        self.assertEqual(SceneSpec.from_dict(scene.to_dict()), scene)
        with self.assertRaises(DataError):
            SceneSpec.from_dict({"seed": 1})

    def test_param_validation(self):
        with self.assertRaises(ArgumentError):
            gen_scene(0, SceneParams.from_config(self.config, max_amplitude=0.3))
        with self.assertRaises(ArgumentError):
            gen_scene(0, SceneParams.from_config(self.config, min_radius=0.6))
        with self.assertRaises(ArgumentError):
            PrimitiveSpec("bump", (0.0, 0.0), -1.0, 0.05)
        with self.assertRaises(ValueError):
            PrimitiveSpec("ridge", (0.0, 0.0), 1.0, 0.05)

    def test_ground_truth_map(self):
        grid = self.config.make_grid()
        scene = gen_scene(6, self.params)
        gt = gt_elevation_map(scene, grid)
        self.assertEqual(gt.shape, (grid.N_x, grid.N_y))
        self.assertTrue(gt.mask.all())
        self.assertAlmostEqual(float(gt.values[3, 4]), float(scene.elevation(grid.x_centers[3], grid.y_centers[4])),
                               places=6)
        dropped = gt_elevation_map(scene, grid, dropout=0.5, seed=1)
        np_assert_equal(dropped.mask, gt_elevation_map(scene, grid, dropout=0.5, seed=1).mask)
        self.assertTrue(0.2 < dropped.mask.mean() < 0.8)
        with self.assertRaises(ArgumentError):
            gt_elevation_map(scene, grid, dropout=1.0)


class TestRayCasting(unittest.TestCase):
    def setUp(self):
        self.config = load_config("desk")
        self.rig = self.config.rigs()[0]
        self.flat = flat_scene(SceneParams.from_config(self.config))

    def test_flat_depth_matches_plane_intersection(self):
        render = render_depth(self.flat, self.rig, 4)
        K, T = self.rig.intrinsics, self.rig.extrinsics
        u, v = pixel_grid(K, 4)
        dirs = pixel_rays(K, T, u, v)
        origin = T.camera_center
        dz = dirs[..., 2]
        with np.errstate(divide="ignore"):
            t = np.where(dz < 0, origin[2] / -np.where(dz < 0, dz, -1.0), np.nan)
        hit_x = origin[0] + t * dirs[..., 0]
        hit_y = origin[1] + t * dirs[..., 1]
        self.assertTrue(render.mask.any())
        np_assert_close(render.depth[render.mask], t[render.mask], atol=1e-3)
        inside = (dz < 0) & (np.abs(hit_x) < 2.9) & (hit_y > 0.1) & (hit_y < 11.9)
        self.assertTrue(np.all(render.mask[inside]))
        self.assertFalse(render.depth[~render.mask].any())

    def test_depth_decreases_down_the_image(self):
        render = render_depth(self.flat, self.rig, 4)
        for col in range(render.shape[1]):
            d = render.depth[render.mask[:, col], col]
            self.assertTrue(np.all(np.diff(d) < 0))

    def test_camera_looking_up_misses(self):
        rig = Rig(self.rig.intrinsics, mounted_extrinsics(1.0, math.radians(-30.0)))
        render = render_depth(self.flat, rig, 8)
        self.assertFalse(render.mask.any())
        self.assertFalse(render.depth.any())

    def test_hits_lie_on_the_surface(self):
        scene = gen_scene(9, SceneParams.from_config(self.config, num_potholes=1))
        render = render_depth(scene, self.rig, 4)
        pts = render.points[render.mask]
        np_assert_close(pts[:, 2], scene.elevation(pts[:, 0], pts[:, 1]), atol=1e-3)

    def test_cast_rays_direct(self):
        origin = np.array([0.0, 0.0, 1.0])
        dirs = np.array([[0.0, 1.0, -1.0], [0.0, 1.0, 1.0], [0.0, 0.0, -1.0]])
        t, hit = cast_rays(self.flat, origin, dirs)
        np_assert_equal(hit, [True, False, True])
        np_assert_close(t[[0, 2]], [1.0, 1.0], atol=1e-4)
        self.assertTrue(np.isnan(t[1]))


class TestRendering(TestCasePlus):
    def setUp(self):
        super().setUp()
        self.config = load_config("desk")
        self.scene = gen_scene(1, SceneParams.from_config(self.config))

    def test_features(self):
        render = render_depth(self.scene, self.config.rigs()[0], 8)
        feat = render_features(self.scene, render, 8, seed=0)
        self.assertEqual(feat.shape, render.shape + (8,))
        self.assertEqual(feat.dtype, np.float32)
        self.assertFalse(feat[~render.mask].any())
        self.assertTrue(np.all(feat >= 0) and np.all(feat <= 1))
        np_assert_equal(feat, render_features(self.scene, render, 8, seed=5))

    def test_oracle_depth(self):
        dspec = self.config.depth_spec()
        rig = self.config.rigs()[0]
        render = render_depth(self.scene, rig, 8)
        probs = oracle_depth_distributions(render, dspec, ground_inverse_depth_step(rig, 8))
        self.assertEqual(probs.dtype, np.float32)
        np_assert_close(probs.sum(axis=-1), 1.0, atol=1e-5)
        np_assert_close(probs[~render.mask], 1.0 / 64, atol=1e-7)
        self.assertTrue(np.all(probs >= 0))

    def test_oracle_depth_peaks_at_rendered_depth(self):
        dspec = self.config.depth_spec()
        render = render_depth(self.scene, self.config.rigs()[0], 8)
        probs = oracle_depth_distributions(render, dspec, 1e-3)
        in_range = render.mask & (render.depth > dspec.d_min) & (render.depth < dspec.d_max)
        self.assertTrue(in_range.any())
        offset = probs[in_range].argmax(axis=-1) - dspec.nearest_bin(render.depth[in_range])
        self.assertTrue(np.all(np.abs(offset) <= 1))
        self.assertGreaterEqual(np.mean(offset == 0), 0.95)

    def test_oracle_depth_mean_inverse_depth(self):
        dspec = self.config.depth_spec()
        render = render_depth(self.scene, self.config.rigs()[0], 4)
        sigma = 0.02
        probs = oracle_depth_distributions(render, dspec, sigma)
        inverse = 1.0 / np.where(render.mask, render.depth, 1.0)
        # away from the folded tails, where the bins are narrower than sigma in inverse depth
        inside = render.mask & (inverse > 1.0 / dspec.d_max + 4 * sigma) & (inverse < 0.4)
        self.assertTrue(inside.any())
        np_assert_close(probs[inside] @ (1.0 / dspec.centers), inverse[inside], atol=2e-3)
        sharper = oracle_depth_distributions(render, dspec, 0.5 * sigma)
        self.assertTrue(np.all(sharper[inside].max(axis=-1) > probs[inside].max(axis=-1)))

    def test_oracle_depth_folds_tails_into_end_bins(self):
        dspec = self.config.depth_spec()
        render = DepthRender(depth=np.array([[0.5, 20.0, 4.0]]), mask=np.array([[True, True, False]]))
        probs = oracle_depth_distributions(render, dspec, 0.01)
        np_assert_close(probs.sum(axis=-1), 1.0, atol=1e-6)
        self.assertGreater(probs[0, 0, 0], 0.999)
        self.assertGreater(probs[0, 1, -1], 0.999)
        np_assert_close(probs[0, 2], 1.0 / 64, atol=1e-7)
        with self.assertRaises(ArgumentError):
            oracle_depth_distributions(render, dspec, 0.0)

    def test_render_scene_is_deterministic(self):
        a = render_scene(self.config, self.scene, depth_noise=0.05)
        b = render_scene(self.config, self.scene, depth_noise=0.05)
        self.assertEqual(len(a.views), 2)
        for s in self.config.strides:
            for camera in range(2):
                np_assert_equal(a.views[camera].features[s], b.views[camera].features[s])
                np_assert_equal(a.views[camera].depth_probs[s], b.views[camera].depth_probs[s])
        self.assertFalse(np.array_equal(a.views[0].features[4], a.views[1].features[4]))

    def test_suite(self):
        scenes = synthetic_suite(self.config, num_scenes=2, seed=10)
        self.assertEqual([s.spec.seed for s in scenes], [10, 11])
        self.assertEqual(len(scenes[0].rigs), 2)
        depth, mask = scenes[0].depth(1, 16)
        one_hot = scenes[0].gt_depth_probs(1, 16, self.config.depth_spec())
        self.assertEqual(one_hot.shape, depth.shape + (64,))
        self.assertTrue(mask.any())
        np_assert_equal(one_hot[mask].max(axis=-1), 1.0)
        np_assert_close(one_hot.sum(axis=-1), 1.0, atol=1e-6)

    def test_scene_directory(self):
        scene = render_scene(self.config, self.scene, with_image=True)
        directory = os.path.join(self.get_auto_remove_tmp_dir(), "scene")
        save_scene(directory, scene, self.config)
        self.assertTrue(os.path.isfile(os.path.join(directory, "cam0", "depth_s4.pgm")))
        loaded = load_scene(directory, self.config)
        self.assertEqual(loaded.spec, scene.spec)
        np_assert_equal(loaded.gt.values, scene.gt.values)
        np_assert_equal(loaded.views[1].features[8], scene.views[1].features[8])
        np_assert_equal(loaded.views[0].image, scene.views[0].image)
        depth, mask = loaded.depth(0, 16)
        np_assert_equal(mask, scene.views[0].depth[16].mask)

        with self.assertRaises(ConfigError):
            load_scene(directory, load_config("desk", {"num_depth_bins": 32}))
        with self.assertRaises(DataError):
            load_scene(os.path.join(directory, "missing"), self.config)
