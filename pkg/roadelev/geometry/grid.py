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

"""Voxel partition of the road region of interest."""

import math
from dataclasses import dataclass

import numpy as np

from roadelev.exceptions import ArgumentError


def _axis_count(lo, hi, res, axis):
    if not (np.isfinite(lo) and np.isfinite(hi)) or hi <= lo:
        raise ArgumentError('{} range ({}, {}) is degenerate'.format(axis, lo, hi))
    if not res > 0:
        raise ArgumentError('{} resolution must be positive, got {}'.format(axis, res))
    # nearest count keeps centers inside the ROI when the extent is not a multiple of res
    count = int(math.floor((hi - lo) / res + 0.5))
    if count < 1:
        raise ArgumentError('{} range ({}, {}) holds no voxel at resolution {}'.format(axis, lo, hi, res))
    return count


@dataclass(frozen=True)
class VoxelGrid:
    x_range: tuple
    y_range: tuple
    z_range: tuple
    x_res: float
    y_res: float
    z_res: float

    def __post_init__(self):
        for name in ("x_range", "y_range", "z_range"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        for axis in "xyz":
            lo, hi = getattr(self, axis + "_range")
            _axis_count(lo, hi, getattr(self, axis + "_res"), axis)

    @property
    def N_x(self):
        return _axis_count(*self.x_range, self.x_res, "x")

    @property
    def N_y(self):
        return _axis_count(*self.y_range, self.y_res, "y")

    @property
    def N_z(self):
        return _axis_count(*self.z_range, self.z_res, "z")

    @property
    def shape(self):
        return (self.N_x, self.N_y, self.N_z)

    @property
    def num_voxels(self):
        return self.N_x * self.N_y * self.N_z

    def _centers(self, lo, res, count):
        return lo + (np.arange(count, dtype=np.float64) + 0.5) * res

    @property
    def x_centers(self):
        return self._centers(self.x_range[0], self.x_res, self.N_x)

    @property
    def y_centers(self):
        return self._centers(self.y_range[0], self.y_res, self.N_y)

    @property
    def z_centers(self):
        return self._centers(self.z_range[0], self.z_res, self.N_z)

    def voxel_centers(self):
        """(N_x, N_y, N_z, 3) float64 world coordinates, row-major over (x, y, z)."""
        xs, ys, zs = np.meshgrid(self.x_centers, self.y_centers, self.z_centers, indexing="ij")
        return np.stack([xs, ys, zs], axis=-1)

    def to_dict(self):
        return {"x_range": list(self.x_range), "y_range": list(self.y_range), "z_range": list(self.z_range),
                "x_res": self.x_res, "y_res": self.y_res, "z_res": self.z_res}


def make_grid(ranges, resolutions):
    """Build a :class:`VoxelGrid` from ((x0, x1), (y0, y1), (z0, z1)) and (x_res, y_res, z_res)."""
    if len(ranges) != 3 or len(resolutions) != 3:
        raise ArgumentError('make_grid needs three ranges and three resolutions')
    for r in ranges:
        if len(r) != 2:
            raise ArgumentError('each range must be a (min, max) pair, got {}'.format(r))
    (x_range, y_range, z_range), (x_res, y_res, z_res) = ranges, resolutions
    return VoxelGrid(tuple(x_range), tuple(y_range), tuple(z_range), float(x_res), float(y_res), float(z_res))
