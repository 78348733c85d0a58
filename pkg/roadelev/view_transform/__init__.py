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

from .depth_bins import DepthBinSpec, FeatureDims, feature_dims
from .fusion import flatten_to_bev, fuse_multiscale, unflatten_from_bev
from .gather import gather_voxels
from .lut import ProjectionLUT, build_lut, load_lut, save_lut
from .sampler import sample_voxels_reference
