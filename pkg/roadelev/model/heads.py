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

"""Toy per-scale feature and depth heads standing in for trained backbones."""

import numpy as np

from roadelev import logging
from roadelev.exceptions import ArgumentError
from roadelev.numerics import as_tensor, check_rank, conv2d, relu, softmax

logger = logging.get_logger(__name__)


def box_downsample(image, stride):
    """Mean over non-overlapping stride x stride blocks of an (H, W, C) image."""
    image = as_tensor(image)
    check_rank(image, 3, 'image')
    H, W, C = image.shape
    if H % stride or W % stride:
        raise ArgumentError('image {}x{} is not divisible by stride {}'.format(H, W, stride))
    return image.reshape(H // stride, stride, W // stride, stride, C).mean(axis=(1, 3), dtype=np.float64).astype(
        image.dtype)


def feature_head(image, weights, stride):
    """(H, W, 3) image -> (H/stride, W/stride, C_i) features: downsample, conv3x3, ReLU, conv3x3."""
    prefix = 'feature_head.s{}.'.format(stride)
    x = box_downsample(image, stride)
    w0 = weights.get(prefix + 'conv0.weight', (None, x.shape[-1], 3, 3))
    x = relu(conv2d(x, w0, bias=weights.optional(prefix + 'conv0.bias', (w0.shape[0],))))
    w1 = weights.get(prefix + 'conv1.weight', (None, w0.shape[0], 3, 3))
    return conv2d(x, w1, bias=weights.optional(prefix + 'conv1.bias', (w1.shape[0],)))


def toy_depth_head(feat, weights, stride):
    """(h, w, C_i) features -> (h, w, C_d) depth distributions (softmax over depth bins)."""
    feat = as_tensor(feat)
    check_rank(feat, 3, 'depth head input')
    prefix = 'depth_head.s{}.'.format(stride)
    w = weights.get(prefix + 'weight', (None, feat.shape[-1], None, None))
    if w.shape[2] % 2 == 0 or w.shape[3] % 2 == 0:
        raise ArgumentError('depth head kernel must have odd spatial size, got {}'.format(w.shape[2:]))
    logits = conv2d(feat, w, bias=weights.optional(prefix + 'bias', (w.shape[0],)))
    return softmax(logits, axis=-1)
