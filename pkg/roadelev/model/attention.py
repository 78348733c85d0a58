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

"""Spatial attention enhancement and confidence attention generation for cost volumes."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from roadelev.exceptions import ArgumentError
from roadelev.numerics import as_tensor, channel_pool, check_finite, check_rank, conv3d, sigmoid, softmax


def spatial_attention(B_l, kernel, bias=None):
    """Per-voxel attention from channel-pooled left features.

    ``kernel`` has shape (1, 2, k_z, k_y, k_x) with odd sizes, applied over (z, y, x) with same-size padding.
    Returns an (N_x, N_y, N_z, 1) field in (0, 1).
    """
    B_l = as_tensor(B_l)
    check_rank(B_l, 4, 'left voxel features')
    kernel = as_tensor(kernel, dtype=B_l.dtype)
    if kernel.ndim != 5 or kernel.shape[:2] != (1, 2) or any(k % 2 == 0 for k in kernel.shape[2:]):
        raise ArgumentError('spatial attention kernel must have shape (1, 2, odd, odd, odd), got {}'.format(
            tuple(kernel.shape)))
    avg, mx = channel_pool(B_l)
    pooled = np.concatenate([avg, mx], axis=-1).transpose(2, 1, 0, 3)
    logits = conv3d(pooled, kernel, bias=bias)
    return sigmoid(np.ascontiguousarray(logits.transpose(2, 1, 0, 3)))


def _check_volume(V, name='cost volume'):
    V = as_tensor(V)
    check_rank(V, 4, name)
    return V


def apply_sae(V, A_s):
    """Scale every group of ``V`` (N_g, N_x, N_y, N_z) by the voxel attention ``A_s`` (N_x, N_y, N_z, 1)."""
    V = _check_volume(V)
    A_s = as_tensor(A_s, dtype=V.dtype)
    if A_s.shape != V.shape[1:] + (1,):
        raise ArgumentError('spatial attention of shape {} does not match volume {}'.format(A_s.shape, V.shape))
    return V * A_s[None, ..., 0]


@dataclass
class ConfidenceField:
    """Per-cell confidence ``sigmoid(epsilon + s * variance)`` of the initial elevation distribution."""

    values: np.ndarray
    s: float
    epsilon: float
    variance: Optional[np.ndarray] = None
    mean: Optional[np.ndarray] = None

    @property
    def shape(self):
        return self.values.shape


def confidence_attention(V_init, z_centers, s=-1.0, epsilon=0.0):
    V_init = _check_volume(V_init, 'initial cost volume')
    z = np.asarray(z_centers, dtype=np.float64)
    if z.shape != (V_init.shape[-1],):
        raise ArgumentError('{} z centers for a volume with N_z = {}'.format(z.size, V_init.shape[-1]))
    check_finite(V_init, 'initial cost volume')

    cost = V_init.mean(axis=0, dtype=np.float64)
    P = softmax(cost, axis=-1)
    mean = P @ z
    variance = (np.square(z - mean[..., None]) * P).sum(axis=-1)
    np.maximum(variance, 0.0, out=variance)
    values = sigmoid((epsilon + s * variance).astype(np.float32))
    return ConfidenceField(values=values, s=float(s), epsilon=float(epsilon), variance=variance, mean=mean)


def apply_cag(V_e, A_c):
    """Scale ``V_e`` (N_g, N_x, N_y, N_z) by the per-cell confidence, broadcast over groups and heights."""
    V_e = _check_volume(V_e)
    values = A_c.values if isinstance(A_c, ConfidenceField) else A_c
    values = as_tensor(values, dtype=V_e.dtype)
    if values.shape != V_e.shape[1:3]:
        raise ArgumentError('confidence field of shape {} does not match volume {}'.format(values.shape, V_e.shape))
    return V_e * values[None, :, :, None]
