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

"""LUT-driven depth-aware voxel gather."""

import numpy as np

from roadelev import logging
from roadelev.exceptions import ArgumentError
from roadelev.numerics.parallel import parallel_for
from roadelev.numerics.tensor import as_tensor, check_rank
from roadelev.view_transform.lut import ProjectionLUT

logger = logging.get_logger(__name__)

# voxels per work item; fixed so chunking never depends on the thread count
GATHER_GRAIN = 16384


def _check_inputs(lut, F_img, D_pre):
    h, w, _ = lut.feat_dims
    check_rank(F_img, 3, 'F_img')
    if F_img.shape[:2] != (h, w):
        raise ArgumentError('F_img is {}x{} but the LUT was built for {}x{}'.format(
            F_img.shape[0], F_img.shape[1], h, w))
    if D_pre is not None:
        check_rank(D_pre, 3, 'D_pre')
        if D_pre.shape != (h, w, lut.dspec.C_d):
            raise ArgumentError('D_pre has shape {}, the LUT expects {}'.format(
                D_pre.shape, (h, w, lut.dspec.C_d)))


def _padded_rows(a, width):
    flat = a.reshape(-1, width) if width else a.reshape(-1)
    pad = np.zeros((1,) + flat.shape[1:], dtype=flat.dtype)
    return np.concatenate([flat, pad], axis=0)


def gather_voxels(lut: ProjectionLUT, F_img, D_pre):
    """F_voxel = bilinear(F_img) * trilinear(D_pre) for every valid voxel, zero elsewhere.

    Args:
        lut: table from :func:`build_lut`.
        F_img: (h, w, C_i) feature map.
        D_pre: (h, w, C_d) per-pixel depth distributions, or ``None`` to skip the depth factor.

    Returns:
        (N_x, N_y, N_z, C_i) voxel features in the dtype of ``F_img``.
    """
    F_img = as_tensor(F_img)
    if D_pre is not None:
        D_pre = as_tensor(D_pre, dtype=F_img.dtype)
    _check_inputs(lut, F_img, D_pre)

    C = F_img.shape[-1]
    feats = _padded_rows(F_img, C)
    depth = _padded_rows(D_pre, 0) if D_pre is not None else None
    feat_w = lut.feat_w.astype(F_img.dtype, copy=False)
    depth_w = lut.depth_w.astype(F_img.dtype, copy=False)

    # one row per valid voxel, in LUT order
    rows = np.empty((lut.num_valid, C), dtype=F_img.dtype)

    def _run(start, stop):
        block = rows[start:stop]
        np.einsum('nkc,nk->nc', feats.take(lut.feat_idx[start:stop], axis=0), feat_w[start:stop], out=block)
        if depth is not None:
            block *= np.einsum('nk,nk->n', depth.take(lut.depth_idx[start:stop]), depth_w[start:stop])[:, None]

    parallel_for(lut.num_valid, _run, grain=GATHER_GRAIN)
    out = np.zeros((lut.num_voxels, C), dtype=F_img.dtype)
    out[lut.voxel_idx] = rows
    return out.reshape(tuple(lut.grid_shape) + (C,))
