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

import unittest

import numpy as np

from roadelev.benchmark import random_view_inputs
from roadelev.config import load_config
from roadelev.data import flat_scene, render_depth, render_scene
from roadelev.data.scene import SceneParams
from roadelev.model import oracle_mono_weights, oracle_stereo_weights, run_mono, run_stereo
from roadelev.numerics import set_num_threads
from roadelev.testing_utils import np_assert_equal
from roadelev.view_transform import build_lut, gather_voxels, sample_voxels_reference


class TestThreadCountIndependence(unittest.TestCase):
    def setUp(self):
        self.config = load_config("desk")

    def tearDown(self):
        set_num_threads(None)

    def _twice(self, fn):
        set_num_threads(1)
        single = fn()
        set_num_threads(4)
        return single, fn()

    def test_gather(self):
        config = self.config
        rig = config.rigs()[0]
        dims = config.feature_dims(4)
        dspec = config.depth_spec()
        lut = build_lut(config.make_grid(), rig.intrinsics, rig.extrinsics, dims, dspec)
        F_img, D_pre = random_view_inputs(dims, config.feature_channels, dspec, seed=5)
        single, multi = self._twice(lambda: gather_voxels(lut, F_img, D_pre))
        np_assert_equal(single, multi)
        single, multi = self._twice(lambda: sample_voxels_reference(
            config.make_grid(), rig.intrinsics, rig.extrinsics, dims, dspec, F_img, D_pre))
        np_assert_equal(single, multi)

    def test_ray_casting(self):
        spec = flat_scene(SceneParams.from_config(self.config))
        rig = self.config.rigs()[0]
        single, multi = self._twice(lambda: render_depth(spec, rig, 4).depth)
        np_assert_equal(single, multi)

    def test_pipelines(self):
        scene = render_scene(self.config, flat_scene(SceneParams.from_config(self.config), seed=3))
        mono_weights = oracle_mono_weights(self.config)
        single, multi = self._twice(lambda: run_mono(scene.inputs(), mono_weights, self.config).elevation.values)
        np_assert_equal(single, multi)

        stereo_weights = oracle_stereo_weights(self.config)

        def stereo():
            return run_stereo(scene.inputs(0), scene.inputs(1), stereo_weights, self.config,
                              rigs=scene.rigs).elevation.values

        single, multi = self._twice(stereo)
        np_assert_equal(single, multi)
        self.assertFalse(np.isnan(single).any())
