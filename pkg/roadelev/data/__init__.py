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

from .io import check_scene_compatible, load_scene, save_scene
from .render import (
    DepthRender,
    cast_rays,
    one_hot_depth,
    oracle_depth_distributions,
    pixel_grid,
    render_depth,
    render_features,
    render_image,
    shading,
)
from .scene import PrimitiveSpec, SceneParams, SceneSpec, flat_scene, gen_scene, gt_elevation_map
from .suite import CameraView, SyntheticScene, render_scene, synthetic_suite
