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

"""Scene directories: the scene description, ground truth and per-camera renders in the tensor file format.

Layout::

    scene.json              SceneSpec
    meta.json               strides, channel and bin counts the renders were made with
    gt_elevation.{json,bin} (N_x, N_y) f32
    gt_mask.{json,bin}      (N_x, N_y) u8
    cam{c}/rig.json
    cam{c}/depth_s{s}       (h, w) f32, with mask_s{s} u8 and a depth_s{s}.pgm preview
    cam{c}/features_s{s}    (h, w, C_i) f32
    cam{c}/depth_probs_s{s} (h, w, C_d) f32
    cam{c}/image            (H, W, 3) f32, when rendered
"""

import json
import os

import numpy as np

from roadelev import logging
from roadelev.data.render import DepthRender
from roadelev.data.scene import SceneSpec
from roadelev.data.suite import CameraView, SyntheticScene
from roadelev.discretization import ElevationMap
from roadelev.exceptions import ConfigError, DataError
from roadelev.geometry import load_rig, save_rig
from roadelev.numerics import load_tensor, save_tensor, tensor_exists, write_pgm

logger = logging.get_logger(__name__)

SCENE_FILE = "scene.json"
META_FILE = "meta.json"


def _camera_dir(directory, camera):
    return os.path.join(directory, "cam{}".format(camera))


def scene_meta(config):
    return {
        "strides": [int(s) for s in config.strides],
        "feature_channels": int(config.feature_channels),
        "num_depth_bins": int(config.num_depth_bins),
        "grid_shape": list(config.make_grid().shape[:2]),
    }


def save_scene(directory, scene, config):
    os.makedirs(directory, exist_ok=True)
    scene.spec.save(os.path.join(directory, SCENE_FILE))
    with open(os.path.join(directory, META_FILE), "w") as f:
        json.dump(scene_meta(config), f, indent=2, sort_keys=True)
        f.write("\n")
    save_tensor(os.path.join(directory, "gt_elevation"), scene.gt.values)
    save_tensor(os.path.join(directory, "gt_mask"), scene.gt.mask, dtype="u8")
    dspec = config.depth_spec()
    for camera, view in enumerate(scene.views):
        cam_dir = _camera_dir(directory, camera)
        os.makedirs(cam_dir, exist_ok=True)
        save_rig(os.path.join(cam_dir, "rig.json"), view.rig)
        for s in sorted(view.depth):
            render = view.depth[s]
            save_tensor(os.path.join(cam_dir, "depth_s{}".format(s)), render.depth)
            save_tensor(os.path.join(cam_dir, "mask_s{}".format(s)), render.mask, dtype="u8")
            write_pgm(os.path.join(cam_dir, "depth_s{}.pgm".format(s)), render.depth, render.mask,
                      value_range=(dspec.d_min, dspec.d_max))
            save_tensor(os.path.join(cam_dir, "features_s{}".format(s)), view.features[s])
            save_tensor(os.path.join(cam_dir, "depth_probs_s{}".format(s)), view.depth_probs[s])
        if view.image is not None:
            save_tensor(os.path.join(cam_dir, "image"), view.image)
    logger.info(f"wrote scene {scene.spec.seed} to {directory}")


def _read_meta(directory):
    path = os.path.join(directory, META_FILE)
    try:
        with open(path) as f:
            return json.load(f)
    except FileNotFoundError:
        raise DataError('scene directory {} has no {}'.format(directory, META_FILE))
    except json.JSONDecodeError as e:
        raise DataError('{} is not valid JSON: {}'.format(path, e))


def check_scene_compatible(meta, config):
    """The scene must have been rendered with the strides and channel counts ``config`` expects."""
    expected = scene_meta(config)
    for key in ("strides", "feature_channels", "num_depth_bins", "grid_shape"):
        if meta.get(key) != expected[key]:
            raise ConfigError('scene was rendered with {} = {}, the config needs {}'.format(
                key, meta.get(key), expected[key]))


def load_scene(directory, config):
    if not os.path.isdir(directory):
        raise DataError('scene directory {} does not exist'.format(directory))
    check_scene_compatible(_read_meta(directory), config)
    spec = SceneSpec.load(os.path.join(directory, SCENE_FILE))
    grid_shape = tuple(config.make_grid().shape[:2])
    gt = ElevationMap(load_tensor(os.path.join(directory, "gt_elevation"), grid_shape),
                      load_tensor(os.path.join(directory, "gt_mask"), grid_shape).astype(bool))
    views = []
    camera = 0
    while os.path.isdir(_camera_dir(directory, camera)):
        cam_dir = _camera_dir(directory, camera)
        try:
            view = CameraView(load_rig(os.path.join(cam_dir, "rig.json")))
        except ConfigError as e:
            raise DataError(str(e))
        for s in config.strides:
            dims = config.feature_dims(s)
            hw = (dims.h, dims.w)
            depth = load_tensor(os.path.join(cam_dir, "depth_s{}".format(s)), hw)
            mask = load_tensor(os.path.join(cam_dir, "mask_s{}".format(s)), hw).astype(bool)
            view.depth[s] = DepthRender(depth=depth, mask=mask)
            view.features[s] = load_tensor(os.path.join(cam_dir, "features_s{}".format(s)),
                                           hw + (config.feature_channels,))
            view.depth_probs[s] = load_tensor(os.path.join(cam_dir, "depth_probs_s{}".format(s)),
                                              hw + (config.num_depth_bins,))
        image = os.path.join(cam_dir, "image")
        if tensor_exists(image):
            view.image = load_tensor(image, (config.image_height, config.image_width, 3))
        views.append(view)
        camera += 1
    if not views:
        raise DataError('scene directory {} holds no camera renders'.format(directory))
    return SyntheticScene(spec=spec, gt=gt, views=views)
