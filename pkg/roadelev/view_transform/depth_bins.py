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

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from roadelev.exceptions import ArgumentError


@dataclass(frozen=True)
class DepthBinSpec:
    """Uniform depth bins over [d_min, d_max]."""

    d_min: float = 1.0
    d_max: float = 9.0
    num_bins: int = 64

    def __post_init__(self):
        if not self.d_min > 0:
            raise ArgumentError('d_min must be positive, got {}'.format(self.d_min))
        if not self.d_max > self.d_min:
            raise ArgumentError('d_max ({}) must exceed d_min ({})'.format(self.d_max, self.d_min))
        if int(self.num_bins) < 2:
            raise ArgumentError('need at least two depth bins, got {}'.format(self.num_bins))

    @property
    def C_d(self):
        return int(self.num_bins)

    @property
    def bin_width(self):
        return (self.d_max - self.d_min) / self.num_bins

    @property
    def centers(self):
        return self.d_min + (np.arange(self.num_bins, dtype=np.float64) + 0.5) * self.bin_width

    @property
    def edges(self):
        return self.d_min + np.arange(self.num_bins + 1, dtype=np.float64) * self.bin_width

    def bin_coordinate(self, d):
        """Continuous bin coordinate; bin k's center sits at k."""
        return (np.asarray(d, dtype=np.float64) - self.d_min) / self.bin_width - 0.5

    def nearest_bin(self, d):
        return np.clip(np.floor((np.asarray(d, dtype=np.float64) - self.d_min) / self.bin_width),
                       0, self.num_bins - 1).astype(np.int64)

    def to_dict(self):
        return {"d_min": self.d_min, "d_max": self.d_max, "num_bins": int(self.num_bins)}


class FeatureDims(NamedTuple):
    h: int
    w: int
    stride: int


def feature_dims(K, stride):
    """Feature map size for an image downsampled by ``stride``."""
    stride = int(stride)
    if stride < 1 or K.width % stride or K.height % stride:
        raise ArgumentError('image {}x{} is not divisible by stride {}'.format(K.width, K.height, stride))
    return FeatureDims(K.height // stride, K.width // stride, stride)
