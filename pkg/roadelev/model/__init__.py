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

from .aggregation import aggregate, conv_transpose3d_x2, downsample2, hourglass
from .attention import ConfidenceField, apply_cag, apply_sae, confidence_attention, spatial_attention
from .bev_encoder import bev_encoder
from .cost_volume import build_cost_volume
from .heads import box_downsample, feature_head, toy_depth_head
from .mono import (
    MonoOutput,
    PipelineInputs,
    VoxelFeatures,
    build_luts,
    column_mask,
    depth_evidence,
    extract_voxel_features,
    run_mono,
)
from .oracle import oracle_mono_weights, oracle_stereo_weights, oracle_weights
from .stereo import StereoOutput, regress_disparity, run_stereo
from .weights import (
    Weights,
    init_mono_weights,
    init_stereo_weights,
    init_weights,
    load_weights,
    mono_weight_shapes,
    stereo_weight_shapes,
    zero_weights,
)
