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

"""Static projection look-up table.

Only voxels that project into the image and the depth range get a row. A row holds the flat voxel index, the
4 bilinear neighbours in the feature map and the 8 trilinear neighbours in the (pixel, depth-bin) volume, with
their weights. Neighbours that fall outside the map point at a padding slot one past the end of the flattened
buffer, which the gather fills with zero.
"""

import json
import os
from dataclasses import dataclass

import numpy as np

from roadelev import logging
from roadelev.exceptions import ArgumentError, DataError
from roadelev.geometry.camera import MIN_DEPTH, project_points
from roadelev.geometry.grid import VoxelGrid
from roadelev.numerics.tensor_io import load_tensor, save_tensor
from roadelev.view_transform.depth_bins import DepthBinSpec, FeatureDims

logger = logging.get_logger(__name__)


@dataclass(frozen=True, eq=False)
class ProjectionLUT:
    grid_shape: tuple
    feat_dims: FeatureDims
    dspec: DepthBinSpec
    valid: np.ndarray  # (V,) bool
    voxel_idx: np.ndarray  # (V_valid,) int32 flat voxel index of each row
    feat_idx: np.ndarray  # (V_valid, 4) int32 into the padded (h*w + 1) feature rows
    feat_w: np.ndarray  # (V_valid, 4) float32
    depth_idx: np.ndarray  # (V_valid, 8) int32 into the padded (h*w*C_d + 1) depth buffer
    depth_w: np.ndarray  # (V_valid, 8) float32

    @property
    def num_voxels(self):
        return int(self.valid.shape[0])

    @property
    def num_valid(self):
        return int(self.voxel_idx.shape[0])

    @property
    def feat_pad_index(self):
        return self.feat_dims.h * self.feat_dims.w

    @property
    def depth_pad_index(self):
        return self.feat_dims.h * self.feat_dims.w * self.dspec.C_d


def _bilinear_stencil(uf, vf, h, w):
    """Flat indices (padding index h*w when out of range) and weights of the 4 bilinear neighbours."""
    x0 = np.floor(uf)
    y0 = np.floor(vf)
    ax = uf - x0
    ay = vf - y0
    x0 = x0.astype(np.int64)
    y0 = y0.astype(np.int64)
    idx = []
    wts = []
    for dy, wy in ((0, 1.0 - ay), (1, ay)):
        for dx, wx in ((0, 1.0 - ax), (1, ax)):
            xs, ys = x0 + dx, y0 + dy
            inside = (xs >= 0) & (xs < w) & (ys >= 0) & (ys < h)
            idx.append(np.where(inside, ys * w + xs, -1))
            wts.append(wx * wy)
    return np.stack(idx, axis=-1), np.stack(wts, axis=-1)


def build_lut(grid: VoxelGrid, K, T, feat_dims: FeatureDims, dspec: DepthBinSpec):
    """Project every voxel center once and store the interpolation stencils of the valid ones.

    Voxels behind the camera, outside the image or outside [d_min, d_max] are invalid and get no row.
    """
    h, w, stride = feat_dims
    if h * stride != K.height or w * stride != K.width:
        raise ArgumentError('feature dims {}x{} at stride {} do not match image {}x{}'.format(
            h, w, stride, K.height, K.width))

    centers = grid.voxel_centers().reshape(-1, 3)
    u, v, d = project_points(centers, K, T)
    with np.errstate(invalid="ignore"):
        valid = ((d > MIN_DEPTH) & (d >= dspec.d_min) & (d <= dspec.d_max)
                 & (u >= 0) & (u < K.width) & (v >= 0) & (v < K.height))
    voxel_idx = np.flatnonzero(valid)
    u, v, d = u[voxel_idx], v[voxel_idx], d[voxel_idx]

    uf = u / stride - 0.5
    vf = v / stride - 0.5
    pix_idx, pix_w = _bilinear_stencil(uf, vf, h, w)

    kd = dspec.bin_coordinate(d)
    k0 = np.floor(kd)
    ak = kd - k0
    k0 = k0.astype(np.int64)

    C_d = dspec.C_d
    feat_pad = h * w
    depth_pad = h * w * C_d
    depth_idx = []
    depth_w = []
    for j in range(4):
        for dk, wk in ((0, 1.0 - ak), (1, ak)):
            ks = k0 + dk
            inside = (pix_idx[:, j] >= 0) & (ks >= 0) & (ks < C_d)
            depth_idx.append(np.where(inside, pix_idx[:, j] * C_d + ks, depth_pad))
            depth_w.append(pix_w[:, j] * wk)
    depth_idx = np.stack(depth_idx, axis=-1)
    depth_w = np.stack(depth_w, axis=-1)
    feat_idx = np.where(pix_idx >= 0, pix_idx, feat_pad)

    lut = ProjectionLUT(
        grid_shape=grid.shape,
        feat_dims=FeatureDims(h, w, stride),
        dspec=dspec,
        valid=valid,
        voxel_idx=voxel_idx.astype(np.int32),
        feat_idx=np.ascontiguousarray(feat_idx, dtype=np.int32),
        feat_w=np.ascontiguousarray(pix_w, dtype=np.float32),
        depth_idx=np.ascontiguousarray(depth_idx, dtype=np.int32),
        depth_w=np.ascontiguousarray(depth_w, dtype=np.float32),
    )
    if lut.num_valid == 0:
        logger.warning(f"projection LUT at stride {stride} has no valid voxel")
    else:
        logger.debug(f"built LUT at stride {stride}: {lut.num_valid}/{lut.num_voxels} valid voxels")
    return lut


_LUT_BLOBS = (
    ("valid", "u8"),
    ("voxel_idx", "i32"),
    ("feat_idx", "i32"),
    ("feat_w", "f32"),
    ("depth_idx", "i32"),
    ("depth_w", "f32"),
)


def save_lut(directory, lut: ProjectionLUT):
    """Dump a LUT as ``lut.json`` plus one little-endian blob per array."""
    os.makedirs(directory, exist_ok=True)
    manifest = {
        "grid_shape": list(lut.grid_shape),
        "feat_dims": {"h": lut.feat_dims.h, "w": lut.feat_dims.w, "stride": lut.feat_dims.stride},
        "dspec": lut.dspec.to_dict(),
        "num_voxels": lut.num_voxels,
        "num_valid": lut.num_valid,
        "blobs": [name for name, _ in _LUT_BLOBS],
    }
    with open(os.path.join(directory, "lut.json"), "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    for name, dtype in _LUT_BLOBS:
        save_tensor(os.path.join(directory, "lut_" + name), getattr(lut, name), name=name, dtype=dtype)


def load_lut(directory):
    path = os.path.join(directory, "lut.json")
    try:
        with open(path) as f:
            manifest = json.load(f)
    except FileNotFoundError:
        raise DataError('missing LUT manifest {}'.format(path))
    arrays = {name: load_tensor(os.path.join(directory, "lut_" + name)) for name, _ in _LUT_BLOBS}
    fd = manifest["feat_dims"]
    return ProjectionLUT(
        grid_shape=tuple(manifest["grid_shape"]),
        feat_dims=FeatureDims(int(fd["h"]), int(fd["w"]), int(fd["stride"])),
        dspec=DepthBinSpec(**manifest["dspec"]),
        valid=arrays["valid"].astype(bool),
        voxel_idx=arrays["voxel_idx"],
        feat_idx=arrays["feat_idx"],
        feat_w=arrays["feat_w"],
        depth_idx=arrays["depth_idx"],
        depth_w=arrays["depth_w"],
    )
