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

"""Numeric kernels shared by the view transformation, the encoders and the stereo stages."""

import numpy as np

from roadelev.exceptions import ArgumentError
from roadelev.numerics.parallel import parallel_for
from roadelev.numerics.tensor import as_tensor, check_rank


def _normalize_axis(axis, ndim):
    if not -ndim <= axis < ndim:
        raise ArgumentError('axis {} is out of range for a rank-{} tensor'.format(axis, ndim))
    return axis % ndim


def softmax(t, axis=-1):
    """Numerically stable softmax along ``axis``."""
    t = as_tensor(t)
    axis = _normalize_axis(axis, t.ndim)
    if t.shape[axis] < 1:
        raise ArgumentError('softmax axis must have length >= 1')
    shifted = t - t.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    return (e / e.sum(axis=axis, keepdims=True)).astype(t.dtype, copy=False)


def sigmoid(t):
    """Elementwise logistic function; outputs stay strictly inside (0, 1)."""
    t = as_tensor(t)
    z = np.exp(-np.abs(t))
    out = np.where(t >= 0, 1.0 / (1.0 + z), z / (1.0 + z)).astype(t.dtype, copy=False)
    info = np.finfo(t.dtype)
    return np.clip(out, info.tiny, 1.0 - info.epsneg)


def channel_pool(t):
    """Average and max over the channel axis of an (N_x, N_y, N_z, C) tensor."""
    t = as_tensor(t)
    check_rank(t, 4, 'channel_pool input')
    if t.shape[-1] < 1:
        raise ArgumentError('channel_pool needs at least one channel')
    # float64 accumulation keeps avg == max exactly when all channels are equal
    avg = t.mean(axis=-1, keepdims=True, dtype=np.float64).astype(t.dtype)
    mx = t.max(axis=-1, keepdims=True)
    return avg, mx


def _check_padding(padding, kernel_sizes):
    if padding is None:
        return tuple((k - 1) // 2 for k in kernel_sizes)
    padding = tuple(int(p) for p in padding)
    if len(padding) != 3 or any(p < 0 for p in padding):
        raise ArgumentError('padding must be three non-negative integers, got {}'.format(padding))
    return padding


def conv3d(t, kernel, padding=None, bias=None):
    """Zero-padded, stride-1 3D cross-correlation.

    Args:
        t: channels-last input of shape (D, H, W, C_in).
        kernel: (C_out, C_in, k_d, k_h, k_w) with odd spatial sizes.
        padding: per-axis zero padding (p_d, p_h, p_w); defaults to (k - 1) / 2, which keeps the spatial shape.
        bias: optional (C_out,) vector.

    Returns:
        (D', H', W', C_out) tensor with D' = D + 2 p_d - k_d + 1 and likewise for H', W'.
    """
    t = as_tensor(t)
    kernel = as_tensor(kernel, dtype=t.dtype)
    check_rank(t, 4, 'conv3d input')
    check_rank(kernel, 5, 'conv3d kernel')
    c_out, c_in, kd, kh, kw = kernel.shape
    if t.shape[-1] != c_in:
        raise ArgumentError('conv3d input has {} channels but the kernel expects {}'.format(t.shape[-1], c_in))
    if any(k % 2 == 0 for k in (kd, kh, kw)):
        raise ArgumentError('conv3d kernel spatial sizes must be odd, got {}'.format((kd, kh, kw)))
    pd, ph, pw = _check_padding(padding, (kd, kh, kw))

    x = np.pad(t, ((pd, pd), (ph, ph), (pw, pw), (0, 0)))
    od, oh, ow = x.shape[0] - kd + 1, x.shape[1] - kh + 1, x.shape[2] - kw + 1
    if min(od, oh, ow) < 1:
        raise ArgumentError('conv3d kernel {} does not fit input {} with padding {}'.format(
            (kd, kh, kw), t.shape[:3], (pd, ph, pw)))

    w = np.ascontiguousarray(kernel.transpose(2, 3, 4, 1, 0))
    out = np.zeros((od, oh, ow, c_out), dtype=t.dtype)

    # split along depth when there is depth to split, otherwise along rows
    split_depth = od > 1

    def _run(start, stop):
        if split_depth:
            acc = np.zeros((stop - start, oh, ow, c_out), dtype=t.dtype)
        else:
            acc = np.zeros((od, stop - start, ow, c_out), dtype=t.dtype)
        for a in range(kd):
            for b in range(kh):
                for c in range(kw):
                    if split_depth:
                        window = x[start + a:stop + a, b:b + oh, c:c + ow]
                    else:
                        window = x[a:a + od, start + b:stop + b, c:c + ow]
                    acc += window @ w[a, b, c]
        if split_depth:
            out[start:stop] = acc
        else:
            out[:, start:stop] = acc

    if split_depth:
        parallel_for(od, _run, grain=1)
    else:
        parallel_for(oh, _run, grain=8)

    if bias is not None:
        bias = as_tensor(bias, dtype=t.dtype)
        if bias.shape != (c_out,):
            raise ArgumentError('conv3d bias must have shape ({},), got {}'.format(c_out, bias.shape))
        out += bias
    return out


def conv2d(t, kernel, padding=None, bias=None):
    """2D cross-correlation of an (H, W, C_in) map with a (C_out, C_in, k_h, k_w) kernel."""
    t = as_tensor(t)
    kernel = as_tensor(kernel, dtype=t.dtype)
    check_rank(t, 3, 'conv2d input')
    check_rank(kernel, 4, 'conv2d kernel')
    if padding is not None:
        padding = (0,) + tuple(padding)
    out = conv3d(t[None], kernel[:, :, None], padding=padding, bias=bias)
    return out[0]


def relu(t):
    return np.maximum(t, 0, dtype=t.dtype)
