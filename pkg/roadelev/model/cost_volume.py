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

"""Cost volumes built from left and right voxel features.

Volumes are (N_g, N_x, N_y, N_z) arrays. The vertical axis plays the role of disparity: left and right features are
compared at the same voxel, so each elevation candidate is scored by how well both views agree there. Every kind
keeps "higher is more similar".
"""

import numpy as np

from roadelev.enums import CostVolumeType, parse_enum
from roadelev.exceptions import ArgumentError
from roadelev.numerics import as_tensor, check_finite, check_rank


def _grouped(t, num_groups):
    N_x, N_y, N_z, N_c = t.shape
    return t.reshape(N_x, N_y, N_z, num_groups, N_c // num_groups)


def build_cost_volume(B_l, B_r, num_groups, kind=CostVolumeType.group_corr):
    """Compare left and right voxel features per voxel.

    ``group_corr`` averages the channel products inside each of ``num_groups`` groups and ``group_diff`` negates the
    mean absolute difference per group. ``multiply`` and ``diff`` are their per-channel forms and ignore
    ``num_groups``.
    """
    B_l = as_tensor(B_l)
    B_r = as_tensor(B_r, dtype=B_l.dtype)
    check_rank(B_l, 4, 'left voxel features')
    if B_l.shape != B_r.shape:
        raise ArgumentError('left and right voxel features differ in shape: {} vs {}'.format(B_l.shape, B_r.shape))
    kind = parse_enum(CostVolumeType, kind)
    N_c = B_l.shape[-1]

    if kind is CostVolumeType.multiply:
        volume = B_l * B_r
    elif kind is CostVolumeType.diff:
        volume = -np.abs(B_l - B_r)
    else:
        if num_groups < 1 or N_c % num_groups != 0:
            raise ArgumentError('{} channels cannot be split into {} groups'.format(N_c, num_groups))
        if kind is CostVolumeType.group_corr:
            volume = (_grouped(B_l, num_groups) * _grouped(B_r, num_groups)).mean(axis=-1)
        else:
            volume = -np.abs(_grouped(B_l, num_groups) - _grouped(B_r, num_groups)).mean(axis=-1)
    volume = np.ascontiguousarray(volume.transpose(3, 0, 1, 2), dtype=B_l.dtype)
    check_finite(volume, 'cost volume')
    return volume
