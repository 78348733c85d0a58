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

"""Monocular elevation pipeline.

image -> per-scale feature and depth heads -> per-scale LUT gather -> multi-scale fusion -> BEV reshape
-> BEV encoder -> softmax over elevation bins -> expectation over bin centers.

Features and depth distributions can be injected directly, bypassing the heads.
"""

from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from roadelev import logging
from roadelev.discretization import ElevationMap, regress_elevation
from roadelev.enums import ViewTransformType
from roadelev.exceptions import ArgumentError
from roadelev.model.bev_encoder import bev_encoder
from roadelev.model.heads import feature_head, toy_depth_head
from roadelev.numerics import as_tensor, softmax
from roadelev.utils import stage
from roadelev.view_transform import (
    build_lut,
    flatten_to_bev,
    fuse_multiscale,
    gather_voxels,
    sample_voxels_reference,
)

logger = logging.get_logger(__name__)


@dataclass
class PipelineInputs:
    """One camera's input: an (H, W, 3) image, or per-stride features and depth distributions."""

    image: Optional[np.ndarray] = None
    features: Optional[Dict[int, np.ndarray]] = None
    depth_probs: Optional[Dict[int, np.ndarray]] = None

    def __post_init__(self):
        if self.image is None and (self.features is None or self.depth_probs is None):
            raise ArgumentError('inputs need an image or both injected features and depth distributions')


@dataclass
class VoxelFeatures:
    B: np.ndarray
    features: Dict[int, np.ndarray]
    depth_probs: Dict[int, np.ndarray]
    column_mask: np.ndarray


@dataclass
class MonoOutput:
    elevation: ElevationMap
    E_prob: np.ndarray
    depth_probs: Dict[int, np.ndarray]
    features: Dict[int, np.ndarray]
    B: np.ndarray
    F_bev: np.ndarray
    logits: np.ndarray
    extras: dict = field(default_factory=dict)


def build_luts(config, rig):
    """One projection LUT per configured stride."""
    grid = config.make_grid()
    dspec = config.depth_spec()
    return {s: build_lut(grid, rig.intrinsics, rig.extrinsics, config.feature_dims(s), dspec) for s in config.strides}


def _scale_inputs(inputs, weights, config, stride):
    if inputs.features is not None:
        if stride not in inputs.features or stride not in inputs.depth_probs:
            raise ArgumentError('injected inputs lack stride {}'.format(stride))
        return as_tensor(inputs.features[stride]), as_tensor(inputs.depth_probs[stride])
    feat = feature_head(inputs.image, weights, stride)
    return feat, toy_depth_head(feat, weights, stride)


def depth_evidence(config, rig, lut, depth_probs):
    """(N_x, N_y) largest depth probability any voxel of a column reads, at the LUT's stride."""
    h, w, stride = lut.feat_dims
    ones = np.ones((h, w, 1), dtype=np.float32)
    if config.view_transform_type is ViewTransformType.lut:
        sampled = gather_voxels(lut, ones, depth_probs)
    else:
        sampled = sample_voxels_reference(config.make_grid(), rig.intrinsics, rig.extrinsics,
                                          config.feature_dims(stride), config.depth_spec(), ones, depth_probs)
    return sampled[..., 0].max(axis=-1)


def column_mask(config, rig, lut, depth_probs):
    """Columns with a visible voxel and, when depth is used, depth evidence above ``min_depth_evidence / C_d``."""
    mask = lut.valid.reshape(lut.grid_shape).any(axis=-1)
    if config.use_depth and config.min_depth_evidence > 0:
        threshold = config.min_depth_evidence / config.num_depth_bins
        evidence = depth_evidence(config, rig, lut, depth_probs) >= threshold
        if np.any(mask & ~evidence):
            logger.debug(f"dropped {int(np.sum(mask & ~evidence))} visible columns without depth evidence")
        mask &= evidence
    return mask


def extract_voxel_features(inputs, weights, config, rig, luts=None, timers=None, tag=""):
    """Heads plus depth-aware projection for every stride, fused into one voxel tensor."""
    if luts is None:
        with stage('build_lut' + tag, timers):
            luts = build_luts(config, rig)
    grid = config.make_grid()
    dspec = config.depth_spec()
    per_scale = []
    features, depth_probs = {}, {}
    for s in config.strides:
        with stage('heads{}.s{}'.format(tag, s), timers):
            feat, probs = _scale_inputs(inputs, weights, config, s)
        features[s], depth_probs[s] = feat, probs
        D = probs if config.use_depth else None
        with stage('view_transform{}.s{}'.format(tag, s), timers):
            if config.view_transform_type is ViewTransformType.lut:
                voxels = gather_voxels(luts[s], feat, D)
            else:
                voxels = sample_voxels_reference(
                    grid, rig.intrinsics, rig.extrinsics, config.feature_dims(s), dspec, feat, D
                ).astype(np.float32)
        per_scale.append(voxels)
    with stage('fuse' + tag, timers):
        B = fuse_multiscale(per_scale, config.fusion)
    finest = min(config.strides)
    with stage('column_mask' + tag, timers):
        mask = column_mask(config, rig, luts[finest], as_tensor(depth_probs[finest]))
    return VoxelFeatures(B, features, depth_probs, mask)


def run_mono(inputs, weights, config, rig=None, luts=None, timers=None):
    """Run the monocular pipeline and return the elevation map with its intermediates."""
    if rig is None:
        rig = config.rigs()[0]
    vox = extract_voxel_features(inputs, weights, config, rig, luts=luts, timers=timers)
    with stage('bev_encoder', timers):
        F_bev = flatten_to_bev(vox.B)
        logits = bev_encoder(F_bev, weights, num_bins=config.num_bins)
    with stage('regression', timers):
        E_prob = softmax(logits, axis=-1)
        elevation = regress_elevation(E_prob, config.bins(), mask=vox.column_mask)
    if not vox.column_mask.any():
        logger.warning("no BEV cell is visible from the camera")
    return MonoOutput(
        elevation=elevation,
        E_prob=E_prob,
        depth_probs=vox.depth_probs,
        features=vox.features,
        B=vox.B,
        F_bev=F_bev,
        logits=logits,
    )
