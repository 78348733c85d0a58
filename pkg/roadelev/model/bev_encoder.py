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

import numpy as np

from roadelev.exceptions import ArgumentError
from roadelev.numerics import as_tensor, check_rank, conv2d, relu


def bev_encoder(F_bev, weights, num_bins=None):
    """Stack of 2D convolutions over the BEV map with ReLU between layers; the last layer emits bin logits."""
    F_bev = as_tensor(F_bev)
    check_rank(F_bev, 3, 'BEV features')
    num_layers = weights.count('bev_encoder.conv')
    if num_layers == 0:
        raise ArgumentError('weights hold no bev_encoder layers')
    x = F_bev
    for i in range(num_layers):
        prefix = 'bev_encoder.conv{}.'.format(i)
        w = weights.get(prefix + 'weight', (None, x.shape[-1], None, None))
        x = conv2d(x, w, bias=weights.optional(prefix + 'bias', (w.shape[0],)))
        if i < num_layers - 1:
            x = relu(x)
    if num_bins is not None and x.shape[-1] != num_bins:
        raise ArgumentError('BEV encoder emits {} logits per cell, expected {}'.format(x.shape[-1], num_bins))
    return x
