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

"""Lightweight 3D cost aggregation: initial convolutions, stacked hourglasses and a single-channel classifier.

Layers run channels-last over (N_z, N_y, N_x, C); the public entry point takes and returns the (N_g, N_x, N_y, N_z)
volume layout.
"""

import numpy as np

from roadelev import logging
from roadelev.exceptions import ArgumentError
from roadelev.numerics import as_tensor, check_rank, conv3d, relu

logger = logging.get_logger(__name__)


def _conv(x, weights, prefix):
    w = weights.get(prefix + 'weight', (None, x.shape[-1], None, None, None))
    return conv3d(x, w, bias=weights.optional(prefix + 'bias', (w.shape[0],)))


def downsample2(x, weights, prefix):
    """Stride-2 convolution: same-size convolution sampled at every other voxel, then ReLU."""
    return relu(_conv(x, weights, prefix)[::2, ::2, ::2])


def conv_transpose3d_x2(x, kernel, out_shape, bias=None):
    """Stride-2 transposed convolution reaching ``out_shape`` exactly.

    ``kernel`` uses the transposed layout (C_in, C_out, k_d, k_h, k_w). The input is spread onto every other voxel of a
    zero volume of ``out_shape`` and convolved with the spatially flipped kernel, which matches a transposed
    convolution with stride 2, padding (k - 1) / 2 and the output padding that yields ``out_shape``.
    """
    x = as_tensor(x)
    check_rank(x, 4, 'transposed convolution input')
    kernel = as_tensor(kernel, dtype=x.dtype)
    check_rank(kernel, 5, 'transposed convolution kernel')
    if kernel.shape[0] != x.shape[-1]:
        raise ArgumentError('transposed kernel expects {} input channels, got {}'.format(kernel.shape[0], x.shape[-1]))
    out_shape = tuple(int(n) for n in out_shape)
    if any((n + 1) // 2 != m for n, m in zip(out_shape, x.shape[:3])):
        raise ArgumentError('cannot upsample {} to {} by a factor of 2'.format(x.shape[:3], out_shape))
    spread = np.zeros(out_shape + (x.shape[-1],), dtype=x.dtype)
    spread[::2, ::2, ::2] = x
    flipped = np.ascontiguousarray(kernel[:, :, ::-1, ::-1, ::-1].transpose(1, 0, 2, 3, 4))
    return conv3d(spread, flipped, bias=bias)


def hourglass(x, weights, prefix):
    """down (stride 2) -> mid -> transposed-conv up by 2, added to the input."""
    down = downsample2(x, weights, prefix + 'down.')
    mid = relu(_conv(down, weights, prefix + 'mid.'))
    w_up = weights.get(prefix + 'up.weight', (mid.shape[-1], x.shape[-1], None, None, None))
    up = conv_transpose3d_x2(mid, w_up, x.shape[:3], bias=weights.optional(prefix + 'up.bias', (w_up.shape[1],)))
    return x + up


def aggregate(V_a, weights):
    """(N_g, N_x, N_y, N_z) attention volume -> (N_x, N_y, N_z) single-channel aggregated volume."""
    V_a = as_tensor(V_a)
    check_rank(V_a, 4, 'attention volume')
    x = np.ascontiguousarray(V_a.transpose(3, 2, 1, 0))
    for i in range(weights.count('agg.conv')):
        x = relu(_conv(x, weights, 'agg.conv{}.'.format(i)))
    for j in range(weights.count('agg.hourglass')):
        x = hourglass(x, weights, 'agg.hourglass{}.'.format(j))
    w = weights.get('agg.classifier.weight', (1, x.shape[-1], None, None, None))
    out = conv3d(x, w, bias=weights.optional('agg.classifier.bias', (1,)))
    return np.ascontiguousarray(out[..., 0].transpose(2, 1, 0))
