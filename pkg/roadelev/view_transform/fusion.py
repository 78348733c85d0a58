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

"""Multi-scale voxel fusion and the voxel-to-BEV reshape."""

import numpy as np

from roadelev.enums import FusionMode, parse_enum
from roadelev.exceptions import ArgumentError
from roadelev.numerics.tensor import as_tensor, check_rank


def fuse_multiscale(voxel_feats, mode=FusionMode.concat):
    """Fuse per-scale (N_x, N_y, N_z, C_i) voxel features by channel concatenation or summation."""
    mode = parse_enum(FusionMode, mode)
    if len(voxel_feats) == 0:
        raise ArgumentError('fuse_multiscale needs at least one input')
    feats = [as_tensor(f) for f in voxel_feats]
    for f in feats:
        check_rank(f, 4, 'voxel features')
    spatial = feats[0].shape[:3]
    if any(f.shape[:3] != spatial for f in feats):
        raise ArgumentError('voxel features disagree on grid shape: {}'.format([f.shape[:3] for f in feats]))
    if mode is FusionMode.concat:
        return np.concatenate(feats, axis=-1)
    if any(f.shape[-1] != feats[0].shape[-1] for f in feats):
        raise ArgumentError('plus fusion needs equal channel counts, got {}'.format([f.shape[-1] for f in feats]))
    out = feats[0].copy()
    for f in feats[1:]:
        out += f
    return out


def flatten_to_bev(B):
    """(N_x, N_y, N_z, C) -> (N_x, N_y, N_z * C); channel index is z * C + c."""
    B = as_tensor(B)
    check_rank(B, 4, 'flatten_to_bev input')
    n_x, n_y, n_z, c = B.shape
    return B.reshape(n_x, n_y, n_z * c)


def unflatten_from_bev(F_bev, N_z):
    F_bev = as_tensor(F_bev)
    check_rank(F_bev, 3, 'unflatten_from_bev input')
    n_x, n_y, channels = F_bev.shape
    if N_z < 1 or channels % N_z:
        raise ArgumentError('{} BEV channels do not split into {} vertical slots'.format(channels, N_z))
    return F_bev.reshape(n_x, n_y, N_z, channels // N_z)
