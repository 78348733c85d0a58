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

"""Constructive weights that let the untrained pipelines read elevation off oracle inputs.

With depth-aware projection a voxel's features are scaled by the depth probability of its own depth along the pixel
ray, so the column profile of any non-negative feature channel peaks at the road surface. The weights below turn that
profile ``p`` into logits ``log p``: a hidden ReLU layer expands each value on geometric thresholds and the next layer
recombines them into a piecewise-linear logarithm. The softmax density over elevations is then proportional to the
profile itself, and multiplicative factors (shading, attention fields) drop out.
"""

import numpy as np

from roadelev import logging
from roadelev.enums import CostVolumeType, FusionMode, PipelineMode, parse_enum
from roadelev.exceptions import ArgumentError
from roadelev.model.weights import head_weight_shapes, zero_weights

logger = logging.get_logger(__name__)

LOG_MIN = 1e-5
LOG_MAX = 4.0
LOG_THRESHOLDS = 24


def log_expansion(num_thresholds=LOG_THRESHOLDS, p_min=LOG_MIN, p_max=LOG_MAX):
    """Thresholds ``tau`` and coefficients ``a`` with ``log(clip(p, p_min, p_max)) = log(p_min) + sum a relu(p - tau)``
    exactly on the thresholds and linearly between them.
    """
    tau = np.geomspace(p_min, p_max, num_thresholds)
    slopes = np.append(np.diff(np.log(tau)) / np.diff(tau), 0.0)
    return tau, np.diff(slopes, prepend=0.0)


def interpolation_matrix(targets, knots):
    """H[i, k]: linear interpolation weight of knot k at ``targets[i]``, clamped at the ends."""
    knots = np.asarray(knots, dtype=np.float64)
    eye = np.eye(knots.size)
    return np.stack([np.interp(targets, knots, eye[k]) for k in range(knots.size)], axis=1)


def presence_channel(config):
    """Fused channel holding the finest scale's shading feature."""
    finest = config.strides.index(min(config.strides))
    return finest * config.feature_channels if config.fusion is FusionMode.concat else 0


def oracle_mono_weights(config):
    """Zero heads plus a 1x1 BEV encoder mapping the presence profile to log-density logits over elevation bins."""
    grid = config.make_grid()
    bins = config.bins()
    N_z, C = grid.N_z, config.fused_channels
    tau, coeff = log_expansion()
    M = tau.size
    offset = presence_channel(config)

    weights = zero_weights(head_weight_shapes(config))

    w0 = np.zeros((N_z, C * N_z, 1, 1), dtype=np.float32)
    for k in range(N_z):
        w0[k, k * C + offset] = 1.0
    weights['bev_encoder.conv0.weight'] = w0
    weights['bev_encoder.conv0.bias'] = np.zeros(N_z)

    w1 = np.zeros((N_z * M, N_z, 1, 1), dtype=np.float32)
    for k in range(N_z):
        w1[k * M:(k + 1) * M, k] = 1.0
    weights['bev_encoder.conv1.weight'] = w1
    weights['bev_encoder.conv1.bias'] = -np.tile(tau, N_z)

    H = interpolation_matrix(bins.centers, grid.z_centers)
    w2 = (H[:, :, None] * coeff[None, None, :]).reshape(bins.N, N_z * M)
    weights['bev_encoder.conv2.weight'] = w2[:, :, None, None]
    # log bin widths turn the logits into a density over elevation rather than over bins
    weights['bev_encoder.conv2.bias'] = np.log(bins.widths) + np.log(LOG_MIN)
    return weights


def _selected_channels(config):
    """Cost-volume channels whose features all come from the finest scale; all channels when none do."""
    C_i = config.feature_channels
    if config.cost_volume_type is CostVolumeType.multiply:
        per_channel, num = 1, config.fused_channels
    else:
        num = config.num_groups
        per_channel = config.fused_channels // num
    if config.fusion is FusionMode.concat:
        start = presence_channel(config)
        selected = [g for g in range(num) if start <= g * per_channel and (g + 1) * per_channel <= start + C_i]
    else:
        selected = list(range(num))
    return selected or list(range(num))


def oracle_stereo_weights(config):
    """Neutral attention, an aggregation stack computing the log of the mean correlation, identity elsewhere."""
    if config.cost_volume_type in (CostVolumeType.group_diff, CostVolumeType.diff):
        raise ArgumentError('oracle aggregation weights need a correlation cost volume, got {}'.format(
            config.cost_volume))
    tau, coeff = log_expansion()
    M = tau.size
    weights = zero_weights(head_weight_shapes(config))
    weights['sae.weight'] = np.zeros((1, 2) + tuple(config.sae_kernel))
    weights['sae.bias'] = np.zeros(1)
    weights['cag.s'] = np.array([config.confidence_s])
    weights['cag.epsilon'] = np.array([config.confidence_epsilon])

    selected = _selected_channels(config)
    w0 = np.zeros((M, config.volume_channels, 1, 1, 1), dtype=np.float32)
    w0[:, selected] = 1.0 / len(selected)
    weights['agg.conv0.weight'] = w0
    weights['agg.conv0.bias'] = -tau

    identity = np.eye(M, dtype=np.float32)[:, :, None, None, None]
    for i in range(1, max(1, config.num_initial_convs)):
        weights['agg.conv{}.weight'.format(i)] = identity
        weights['agg.conv{}.bias'.format(i)] = np.zeros(M)
    for j in range(config.num_hourglass):
        prefix = 'agg.hourglass{}.'.format(j)
        for part in ('down', 'mid', 'up'):
            weights[prefix + part + '.weight'] = np.zeros((M, M, 3, 3, 3))
            weights[prefix + part + '.bias'] = np.zeros(M)
    weights['agg.classifier.weight'] = coeff.reshape(1, M, 1, 1, 1)
    weights['agg.classifier.bias'] = np.array([np.log(LOG_MIN)])
    logger.debug(f"oracle stereo weights average {len(selected)} of {config.volume_channels} cost channels")
    return weights


def oracle_weights(config, mode):
    if parse_enum(PipelineMode, mode) is PipelineMode.mono:
        return oracle_mono_weights(config)
    return oracle_stereo_weights(config)
