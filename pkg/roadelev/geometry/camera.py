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

"""Pinhole camera model, rigs and the world-to-pixel projection.

Frames: world X right, Y forward along the road, Z up; camera x right, y down, z forward.
Depth ``d`` is the camera-frame z coordinate, not the Euclidean ray length.
"""

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from roadelev import logging
from roadelev.exceptions import ArgumentError, ConfigError, PointBehindCameraError

logger = logging.get_logger(__name__)

# Points closer than this to the camera plane are treated as behind the camera.
MIN_DEPTH = 1e-6

# (x, y, z)_world -> (x, -z, y)_camera
LEVEL_ROTATION = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise ArgumentError('focal lengths must be positive, got fx={} fy={}'.format(self.fx, self.fy))
        if int(self.width) < 1 or int(self.height) < 1:
            raise ArgumentError('image size must be positive, got {}x{}'.format(self.width, self.height))
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ArgumentError('principal point ({}, {}) lies outside the {}x{} image'.format(
                self.cx, self.cy, self.width, self.height))

    @property
    def matrix(self):
        return np.array([[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]])

    def to_dict(self):
        return {"fx": self.fx, "fy": self.fy, "cx": self.cx, "cy": self.cy,
                "width": int(self.width), "height": int(self.height)}

    @classmethod
    def from_dict(cls, d):
        return cls(fx=float(d["fx"]), fy=float(d["fy"]), cx=float(d["cx"]), cy=float(d["cy"]),
                   width=int(d["width"]), height=int(d["height"]))


@dataclass(frozen=True, eq=False)
class CameraExtrinsics:
    """World-to-camera rigid transform: p_cam = R p_world + t."""

    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        rotation = np.asarray(self.rotation, dtype=np.float64).reshape(3, 3)
        translation = np.asarray(self.translation, dtype=np.float64).reshape(3)
        if not np.allclose(rotation @ rotation.T, np.eye(3), atol=1e-6):
            raise ArgumentError('rotation is not orthonormal')
        if abs(np.linalg.det(rotation) - 1.0) > 1e-6:
            raise ArgumentError('rotation must have determinant +1')
        if not np.all(np.isfinite(translation)):
            raise ArgumentError('translation must be finite')
        rotation.setflags(write=False)
        translation.setflags(write=False)
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "translation", translation)

    @property
    def camera_center(self):
        return -self.rotation.T @ self.translation

    def to_camera(self, points):
        """Transform (..., 3) world points into the camera frame."""
        return np.asarray(points, dtype=np.float64) @ self.rotation.T + self.translation

    def to_world(self, points):
        return (np.asarray(points, dtype=np.float64) - self.translation) @ self.rotation


@dataclass(frozen=True, eq=False)
class Rig:
    intrinsics: CameraIntrinsics
    extrinsics: CameraExtrinsics

    def to_dict(self):
        return {
            "intrinsics": self.intrinsics.to_dict(),
            "rotation": [float(v) for v in self.extrinsics.rotation.reshape(-1)],
            "translation": [float(v) for v in self.extrinsics.translation],
        }

    @classmethod
    def from_dict(cls, d):
        try:
            intrinsics = CameraIntrinsics.from_dict(d["intrinsics"])
            rotation = np.asarray(d["rotation"], dtype=np.float64)
            translation = np.asarray(d["translation"], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError('malformed rig description: {}'.format(e))
        if rotation.size != 9 or translation.size != 3:
            raise ConfigError('rig rotation needs 9 values and translation 3')
        return cls(intrinsics, CameraExtrinsics(rotation.reshape(3, 3), translation))


class PixelPoint(NamedTuple):
    u: float
    v: float
    d: float


def project_points(points, K, T):
    """Vectorized projection of (..., 3) world points; returns float64 (u, v, d) without culling."""
    p_cam = T.to_camera(points)
    d = p_cam[..., 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        u = K.fx * p_cam[..., 0] / d + K.cx
        v = K.fy * p_cam[..., 1] / d + K.cy
    return u, v, d


def project_point(p3d, K, T):
    """Project one world point; raises :class:`PointBehindCameraError` when d <= 1e-6."""
    p_cam = T.to_camera(np.asarray(p3d, dtype=np.float64).reshape(3))
    d = float(p_cam[2])
    if d <= MIN_DEPTH:
        raise PointBehindCameraError('point {} has camera depth {:.3g}'.format(list(map(float, p3d)), d))
    u = K.fx * p_cam[0] / d + K.cx
    v = K.fy * p_cam[1] / d + K.cy
    return PixelPoint(float(u), float(v), d)


def backproject(u, v, d, K, T):
    """Inverse of :func:`project_point` for a pixel with known depth."""
    x = (np.asarray(u, dtype=np.float64) - K.cx) / K.fx * d
    y = (np.asarray(v, dtype=np.float64) - K.cy) / K.fy * d
    p_cam = np.stack(np.broadcast_arrays(x, y, np.asarray(d, dtype=np.float64)), axis=-1)
    return T.to_world(p_cam)


def pixel_rays(K, T, u, v):
    """World-frame ray directions through pixel coordinates, scaled so that camera depth grows by 1 per unit."""
    x = (np.asarray(u, dtype=np.float64) - K.cx) / K.fx
    y = (np.asarray(v, dtype=np.float64) - K.cy) / K.fy
    dirs_cam = np.stack(np.broadcast_arrays(x, y, np.ones_like(x)), axis=-1)
    return dirs_cam @ T.rotation


def ground_inverse_depth_step(rig, stride=1):
    """Change of 1/d per feature row at ``stride`` for rays hitting the plane z = 0.

    A ground ray has ``1/d = -(r . e_z) / h`` with ``h`` the camera height, which is linear in the pixel row.
    """
    K, T = rig.intrinsics, rig.extrinsics
    h = float(T.camera_center[2])
    slope = abs(float(T.rotation[1, 2]))
    if h <= 0 or slope == 0:
        raise ArgumentError('camera at height {:.3g} with row slope {:.3g} does not look at the ground'.format(
            h, slope))
    return stride * slope / (K.fy * h)


def default_extrinsics():
    """Level camera at the world origin looking down +Y."""
    return CameraExtrinsics(LEVEL_ROTATION.copy(), np.zeros(3))


def mounted_extrinsics(height, pitch, lateral_offset=0.0):
    """Camera at (lateral_offset, 0, height) looking down +Y, tilted towards the road by ``pitch`` radians."""
    c, s = math.cos(pitch), math.sin(pitch)
    rotation = np.array([
        [1.0, 0.0, 0.0],
        [0.0, -s, -c],
        [0.0, c, -s],
    ])
    center = np.array([lateral_offset, 0.0, height], dtype=np.float64)
    return CameraExtrinsics(rotation, -rotation @ center)


def default_rig(K):
    return Rig(K, default_extrinsics())


def stereo_rigs(K, height, pitch, baseline):
    """Rectified horizontal stereo pair centred on x = 0; returns (left, right)."""
    if baseline <= 0:
        raise ArgumentError('stereo baseline must be positive, got {}'.format(baseline))
    left = Rig(K, mounted_extrinsics(height, pitch, -0.5 * baseline))
    right = Rig(K, mounted_extrinsics(height, pitch, 0.5 * baseline))
    return left, right


def save_rig(path, rig):
    with open(path, "w") as f:
        json.dump(rig.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")


def load_rig(path):
    try:
        with open(path) as f:
            return Rig.from_dict(json.load(f))
    except FileNotFoundError:
        raise ConfigError('rig file {} does not exist'.format(path))
    except json.JSONDecodeError as e:
        raise ConfigError('rig file {} is not valid JSON: {}'.format(path, e))
