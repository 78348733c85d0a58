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

"""Sampler-based depth-aware projection in float64.

Projects every voxel on the fly and interpolates the feature map (bilinear) and the depth volume
(trilinear over u, v and the depth-bin axis) with explicit bounds checks. It is the reference the LUT
gather is checked against and the baseline the view-transform benchmark times.
"""

import numpy as np

from roadelev.exceptions import ArgumentError
from roadelev.geometry.camera import MIN_DEPTH
from roadelev.numerics.parallel import parallel_for
from roadelev.numerics.tensor import check_rank

REFERENCE_GRAIN = 16384


def _sample_2d(img, xf, yf):
    """Zero-padded bilinear sample of (h, w, C) ``img`` at float coordinates."""
    h, w = img.shape[:2]
    x0 = np.floor(xf).astype(np.int64)
    y0 = np.floor(yf).astype(np.int64)
    out = np.zeros((xf.shape[0], img.shape[2]), dtype=np.float64)
    for dy in (0, 1):
        for dx in (0, 1):
            xs, ys = x0 + dx, y0 + dy
            wgt = (1.0 - np.abs(xf - xs)) * (1.0 - np.abs(yf - ys))
            inside = (xs >= 0) & (xs < w) & (ys >= 0) & (ys < h)
            vals = np.zeros_like(out)
            vals[inside] = img[ys[inside], xs[inside]]
            out += wgt[:, None] * vals
    return out


def _sample_3d(vol, xf, yf, kf):
    """Zero-padded trilinear sample of (h, w, C_d) ``vol`` over (x, y, bin)."""
    h, w, c_d = vol.shape
    x0 = np.floor(xf).astype(np.int64)
    y0 = np.floor(yf).astype(np.int64)
    k0 = np.floor(kf).astype(np.int64)
    out = np.zeros(xf.shape[0], dtype=np.float64)
    for dy in (0, 1):
        for dx in (0, 1):
            for dk in (0, 1):
                xs, ys, ks = x0 + dx, y0 + dy, k0 + dk
                wgt = (1.0 - np.abs(xf - xs)) * (1.0 - np.abs(yf - ys)) * (1.0 - np.abs(kf - ks))
                inside = (xs >= 0) & (xs < w) & (ys >= 0) & (ys < h) & (ks >= 0) & (ks < c_d)
                vals = np.zeros_like(out)
                vals[inside] = vol[ys[inside], xs[inside], ks[inside]]
                out += wgt * vals
    return out


def sample_voxels_reference(grid, K, T, feat_dims, dspec, F_img, D_pre):
    """Float64 reference for :func:`gather_voxels`; pass ``D_pre=None`` to skip the depth factor."""
    h, w, stride = feat_dims
    F_img = np.asarray(F_img, dtype=np.float64)
    check_rank(F_img, 3, 'F_img')
    if F_img.shape[:2] != (h, w):
        raise ArgumentError('F_img is {}x{} but feature dims are {}x{}'.format(F_img.shape[0], F_img.shape[1], h, w))
    if D_pre is not None:
        D_pre = np.asarray(D_pre, dtype=np.float64)
        check_rank(D_pre, 3, 'D_pre')
        if D_pre.shape != (h, w, dspec.C_d):
            raise ArgumentError('D_pre has shape {}, expected {}'.format(D_pre.shape, (h, w, dspec.C_d)))
    if h * stride != K.height or w * stride != K.width:
        raise ArgumentError('feature dims {}x{} at stride {} do not match image {}x{}'.format(
            h, w, stride, K.height, K.width))

    centers = grid.voxel_centers().reshape(-1, 3)
    out = np.zeros((centers.shape[0], F_img.shape[2]), dtype=np.float64)
    R = np.asarray(T.rotation, dtype=np.float64)
    t = np.asarray(T.translation, dtype=np.float64)

    def _run(start, stop):
        p_cam = centers[start:stop] @ R.T + t
        d = p_cam[:, 2]
        safe_d = np.where(d > MIN_DEPTH, d, 1.0)
        u = K.fx * p_cam[:, 0] / safe_d + K.cx
        v = K.fy * p_cam[:, 1] / safe_d + K.cy
        ok = ((d > MIN_DEPTH) & (d >= dspec.d_min) & (d <= dspec.d_max)
              & (u >= 0) & (u < K.width) & (v >= 0) & (v < K.height))
        if not ok.any():
            return
        xf = u[ok] / stride - 0.5
        yf = v[ok] / stride - 0.5
        value = _sample_2d(F_img, xf, yf)
        if D_pre is not None:
            kf = (d[ok] - dspec.d_min) / dspec.bin_width - 0.5
            value *= _sample_3d(D_pre, xf, yf, kf)[:, None]
        out[start + np.flatnonzero(ok)] = value

    parallel_for(centers.shape[0], _run, grain=REFERENCE_GRAIN)
    return out.reshape(grid.shape + (F_img.shape[2],))
