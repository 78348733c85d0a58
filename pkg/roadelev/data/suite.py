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

"""Rendered synthetic scenes: ground truth plus oracle inputs for both cameras of the stereo rig."""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from roadelev import logging
from roadelev.data.render import (
    DepthRender,
    one_hot_depth,
    oracle_depth_distributions,
    render_depth,
    render_features,
    render_image,
)
from roadelev.data.scene import SceneParams, gen_scene, gt_elevation_map
from roadelev.discretization import ElevationMap
from roadelev.exceptions import ArgumentError
from roadelev.geometry import Rig, ground_inverse_depth_step
from roadelev.model.mono import PipelineInputs

logger = logging.get_logger(__name__)

# stream tags for per-camera random generators
_FEATURE_NOISE, _DEPTH_NOISE, _IMAGE_NOISE = 0, 1, 2


@dataclass
class CameraView:
    """One camera's renders at every stride."""

    rig: Rig
    depth: Dict[int, DepthRender] = field(default_factory=dict)
    features: Dict[int, np.ndarray] = field(default_factory=dict)
    depth_probs: Dict[int, np.ndarray] = field(default_factory=dict)
    image: Optional[np.ndarray] = None

    def inputs(self, use_image=False):
        if use_image:
            if self.image is None:
                raise ArgumentError('this view was rendered without an image')
            return PipelineInputs(image=self.image)
        return PipelineInputs(features=self.features, depth_probs=self.depth_probs)


@dataclass
class SyntheticScene:
    spec: object
    gt: ElevationMap
    views: List[CameraView]

    def inputs(self, camera=0, use_image=False):
        return self.views[camera].inputs(use_image)

    def depth(self, camera, stride):
        """(depth, hit mask) of ``camera`` at ``stride``."""
        render = self.views[camera].depth[stride]
        return render.depth, render.mask

    def gt_depth_probs(self, camera, stride, dspec):
        return one_hot_depth(self.views[camera].depth[stride], dspec)

    @property
    def rigs(self):
        return [view.rig for view in self.views]


def _rng_seed(scene_seed, camera, stride, stream):
    return [int(scene_seed), int(camera), int(stride), stream]


def render_scene(config, spec, depth_noise=None, with_image=False):
    """Render ground truth, features and oracle depth distributions for both cameras of ``config.rigs()``."""
    depth_noise = config.depth_noise if depth_noise is None else depth_noise
    dspec = config.depth_spec()
    views = []
    for camera, rig in enumerate(config.rigs()):
        view = CameraView(rig)
        for s in config.strides:
            render = render_depth(spec, rig, s)
            view.depth[s] = render
            view.features[s] = render_features(
                spec, render, config.feature_channels, _rng_seed(spec.seed, camera, s, _FEATURE_NOISE),
                noise=config.feature_noise)
            # width in feature rows on the ground plane
            sigma_inverse = config.oracle_depth_sigma * ground_inverse_depth_step(rig, s)
            view.depth_probs[s] = oracle_depth_distributions(
                render, dspec, sigma_inverse, noise=depth_noise, seed=_rng_seed(spec.seed, camera, s, _DEPTH_NOISE))
        if with_image:
            view.image = render_image(spec, rig, _rng_seed(spec.seed, camera, 1, _IMAGE_NOISE),
                                      noise=config.feature_noise)
        views.append(view)
    gt = gt_elevation_map(spec, config.make_grid(), dropout=config.label_dropout)
    return SyntheticScene(spec=spec, gt=gt, views=views)


def synthetic_suite(config, num_scenes=10, seed=None, depth_noise=None, **param_overrides):
    """``num_scenes`` consecutive-seed scenes rendered for paired mono / stereo evaluation."""
    seed = config.seed if seed is None else seed
    params = SceneParams.from_config(config, **param_overrides)
    scenes = [render_scene(config, gen_scene(seed + i, params), depth_noise=depth_noise) for i in range(num_scenes)]
    logger.info(f"rendered a synthetic suite of {num_scenes} scenes from seed {seed}")
    return scenes
