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

"""Stereo elevation pipeline.

left/right voxel features (shared heads, one LUT set per camera) -> cost volume -> spatial attention on the left
features -> confidence attention from the initial volume -> aggregation -> softmax expectation over voxel heights.
"""

from dataclasses import dataclass, field

import numpy as np

from roadelev import logging
from roadelev.discretization import ElevationMap
from roadelev.exceptions import ArgumentError
from roadelev.model.aggregation import aggregate
from roadelev.model.attention import (
    ConfidenceField,
    apply_cag,
    apply_sae,
    confidence_attention,
    spatial_attention,
)
from roadelev.model.cost_volume import build_cost_volume
from roadelev.model.mono import extract_voxel_features
from roadelev.numerics import as_tensor, check_rank, softmax
from roadelev.utils import stage

logger = logging.get_logger(__name__)


@dataclass
class StereoOutput:
    elevation: ElevationMap
    A_s: np.ndarray
    A_c: ConfidenceField
    intermediates: dict = field(default_factory=dict)


def regress_disparity(volume, z_centers, mask=None):
    """Softmax over the height axis of an (N_x, N_y, N_z) volume, then the expected height."""
    volume = as_tensor(volume)
    check_rank(volume, 3, 'aggregated volume')
    z = np.asarray(z_centers, dtype=np.float64)
    if z.shape != (volume.shape[-1],) or not np.all(np.isfinite(z)):
        raise ArgumentError('z centers must be {} finite values'.format(volume.shape[-1]))
    steps = np.diff(z)
    if z.size > 1 and not (np.all(steps > 0) or np.all(steps < 0)):
        raise ArgumentError('z centers must be strictly monotonic')
    P = softmax(volume.astype(np.float64), axis=-1)
    values = np.clip(P @ z, z.min(), z.max()).astype(np.float32)
    if mask is None:
        mask = np.ones(values.shape, dtype=bool)
    return ElevationMap(values, np.asarray(mask, dtype=bool))


def _ones_confidence(shape, config):
    return ConfidenceField(
        values=np.ones(shape, dtype=np.float32), s=float(config.confidence_s),
        epsilon=float(config.confidence_epsilon), variance=None, mean=None)


def run_stereo(left, right, weights, config, rigs=None, luts=None, timers=None):
    """Run the stereo pipeline on a rectified camera pair.

    ``luts`` is an optional (left, right) pair of per-stride LUT dicts. Attention stages switched off in the config
    report fields of ones.
    """
    left_rig, right_rig = rigs if rigs is not None else config.rigs()
    left_luts, right_luts = luts if luts is not None else (None, None)
    grid = config.make_grid()
    z_centers = grid.z_centers

    vox_l = extract_voxel_features(left, weights, config, left_rig, luts=left_luts, timers=timers, tag='.left')
    vox_r = extract_voxel_features(right, weights, config, right_rig, luts=right_luts, timers=timers, tag='.right')
    B_l, B_r = vox_l.B, vox_r.B

    with stage('cost_volume', timers):
        V_init = build_cost_volume(B_l, B_r, config.num_groups, config.cost_volume_type)

    with stage('spatial_attention', timers):
        if config.use_sae:
            A_s = spatial_attention(
                B_l, weights.get('sae.weight', (1, 2, None, None, None)), bias=weights.optional('sae.bias', (1,)))
            V_e = apply_sae(V_init, A_s)
        else:
            A_s = np.ones(grid.shape + (1,), dtype=np.float32)
            V_e = V_init

    with stage('confidence_attention', timers):
        if config.use_cag:
            s = float(weights.get('cag.s', (1,))[0])
            epsilon = float(weights.get('cag.epsilon', (1,))[0])
            A_c = confidence_attention(V_init, z_centers, s=s, epsilon=epsilon)
            V_a = apply_cag(V_e, A_c)
        else:
            A_c = _ones_confidence(grid.shape[:2], config)
            V_a = V_e

    with stage('aggregation', timers):
        aggregated = aggregate(V_a, weights)

    mask = vox_l.column_mask & vox_r.column_mask
    if not mask.any():
        logger.warning("no BEV cell is visible from both cameras")
    with stage('regression', timers):
        elevation = regress_disparity(aggregated, z_centers, mask=mask)

    intermediates = {
        'B_l': B_l,
        'B_r': B_r,
        'V_init': V_init,
        'V_e': V_e,
        'V_a': V_a,
        'aggregated': aggregated,
        'depth_probs_left': vox_l.depth_probs,
        'depth_probs_right': vox_r.depth_probs,
    }
    return StereoOutput(elevation=elevation, A_s=A_s, A_c=A_c, intermediates=intermediates)
