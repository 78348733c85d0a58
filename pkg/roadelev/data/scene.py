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

"""Procedural road surfaces: a tilted base plane plus smooth bumps, potholes and cracks."""

import json
import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from roadelev import logging
from roadelev.discretization import ElevationMap
from roadelev.enums import PrimitiveKind, parse_enum
from roadelev.exceptions import ArgumentError, DataError

logger = logging.get_logger(__name__)

# crack half-width relative to its half-length
CRACK_WIDTH_RATIO = 1.0 / 8.0


def _cosine_window(r, radius):
    """0.5 (1 + cos(pi r / R)) inside |r| < R, 0 outside; C1 at both ends."""
    inside = np.abs(r) < radius
    return np.where(inside, 0.5 * (1.0 + np.cos(np.pi * r / radius)), 0.0)


def _cosine_window_grad(r, radius):
    inside = np.abs(r) < radius
    return np.where(inside, -0.5 * np.pi / radius * np.sin(np.pi * r / radius), 0.0)


@dataclass(frozen=True)
class PrimitiveSpec:
    kind: str
    center: Tuple[float, float]
    radius: float
    amplitude: float
    angle: float = 0.0

    def __post_init__(self):
        parse_enum(PrimitiveKind, self.kind)
        if not self.radius > 0:
            raise ArgumentError('primitive radius must be positive, got {}'.format(self.radius))
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    @property
    def primitive_kind(self):
        return parse_enum(PrimitiveKind, self.kind)

    def _frame(self, x, y):
        dx, dy = x - self.center[0], y - self.center[1]
        c, s = math.cos(self.angle), math.sin(self.angle)
        return dx, dy, dx * c + dy * s, -dx * s + dy * c

    def elevation(self, x, y):
        dx, dy, along, across = self._frame(x, y)
        if self.primitive_kind is PrimitiveKind.crack:
            width = self.radius * CRACK_WIDTH_RATIO
            return self.amplitude * _cosine_window(along, self.radius) * _cosine_window(across, width)
        return self.amplitude * _cosine_window(np.hypot(dx, dy), self.radius)

    def gradient(self, x, y):
        """(dh/dx, dh/dy) of this primitive."""
        dx, dy, along, across = self._frame(x, y)
        if self.primitive_kind is PrimitiveKind.crack:
            width = self.radius * CRACK_WIDTH_RATIO
            c, s = math.cos(self.angle), math.sin(self.angle)
            f, g = _cosine_window(along, self.radius), _cosine_window(across, width)
            df, dg = _cosine_window_grad(along, self.radius), _cosine_window_grad(across, width)
            d_along = self.amplitude * df * g
            d_across = self.amplitude * f * dg
            return d_along * c - d_across * s, d_along * s + d_across * c
        r = np.hypot(dx, dy)
        dr = self.amplitude * _cosine_window_grad(r, self.radius)
        safe = np.where(r > 0, r, 1.0)
        return np.where(r > 0, dr * dx / safe, 0.0), np.where(r > 0, dr * dy / safe, 0.0)

    def to_dict(self):
        return {"kind": self.kind, "center": list(self.center), "radius": self.radius,
                "amplitude": self.amplitude, "angle": self.angle}

    @classmethod
    def from_dict(cls, d):
        return cls(kind=d["kind"], center=tuple(d["center"]), radius=float(d["radius"]),
                   amplitude=float(d["amplitude"]), angle=float(d.get("angle", 0.0)))


@dataclass(frozen=True)
class SceneSpec:
    """A deterministic elevation field z = h(x, y) over ``x_extent`` x ``y_extent``.

    The base plane rises by tan(tilt_pitch) per meter forward and tan(tilt_roll) per meter right of ``pivot``.
    """

    seed: int
    tilt_pitch: float = 0.0
    tilt_roll: float = 0.0
    primitives: Tuple[PrimitiveSpec, ...] = ()
    x_extent: Tuple[float, float] = (-3.0, 3.0)
    y_extent: Tuple[float, float] = (0.0, 12.0)
    pivot: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "primitives", tuple(self.primitives))
        for lo, hi in (self.x_extent, self.y_extent):
            if not hi > lo:
                raise ArgumentError('scene extent [{}, {}] is empty'.format(lo, hi))

    def elevation(self, x, y):
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        h = math.tan(self.tilt_pitch) * (y - self.pivot[1]) + math.tan(self.tilt_roll) * (x - self.pivot[0])
        for p in self.primitives:
            h = h + p.elevation(x, y)
        return h

    def gradient(self, x, y):
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        gx = np.full(np.broadcast(x, y).shape, math.tan(self.tilt_roll))
        gy = np.full(gx.shape, math.tan(self.tilt_pitch))
        for p in self.primitives:
            px, py = p.gradient(x, y)
            gx, gy = gx + px, gy + py
        return gx, gy

    def normals(self, x, y):
        """Unit upward surface normals, shape (..., 3)."""
        gx, gy = self.gradient(x, y)
        n = np.stack([-gx, -gy, np.ones_like(gx)], axis=-1)
        return n / np.linalg.norm(n, axis=-1, keepdims=True)

    def elevation_bound(self):
        """An upper bound on |h| over the extent."""
        corners_x = np.array(self.x_extent) - self.pivot[0]
        corners_y = np.array(self.y_extent) - self.pivot[1]
        tilt = abs(math.tan(self.tilt_pitch)) * np.abs(corners_y).max() + \
            abs(math.tan(self.tilt_roll)) * np.abs(corners_x).max()
        return float(tilt + sum(abs(p.amplitude) for p in self.primitives))

    def contains(self, x, y):
        return (x >= self.x_extent[0]) & (x <= self.x_extent[1]) & (y >= self.y_extent[0]) & (y <= self.y_extent[1])

    def to_dict(self):
        return {
            "seed": int(self.seed),
            "tilt_pitch": self.tilt_pitch,
            "tilt_roll": self.tilt_roll,
            "primitives": [p.to_dict() for p in self.primitives],
            "x_extent": list(self.x_extent),
            "y_extent": list(self.y_extent),
            "pivot": list(self.pivot),
        }

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(
                seed=int(d["seed"]),
                tilt_pitch=float(d.get("tilt_pitch", 0.0)),
                tilt_roll=float(d.get("tilt_roll", 0.0)),
                primitives=tuple(PrimitiveSpec.from_dict(p) for p in d.get("primitives", [])),
                x_extent=tuple(d["x_extent"]),
                y_extent=tuple(d["y_extent"]),
                pivot=tuple(d.get("pivot", (0.0, 0.0))),
            )
        except (KeyError, TypeError) as e:
            raise DataError('malformed scene description: {!r}'.format(e))

    def save(self, path):
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")

    @classmethod
    def load(cls, path):
        try:
            with open(path) as f:
                return cls.from_dict(json.load(f))
        except FileNotFoundError:
            raise DataError('scene file {} does not exist'.format(path))
        except json.JSONDecodeError as e:
            raise DataError('scene file {} is not valid JSON: {}'.format(path, e))


@dataclass
class SceneParams:
    """Ranges the generator samples from; primitive centers fall inside ``roi_x`` x ``roi_y``."""

    num_bumps: int = 3
    num_potholes: int = 0
    num_cracks: int = 0
    max_amplitude: float = 0.05
    min_radius: float = 0.25
    max_radius: float = 0.5
    max_tilt: float = 0.0
    e_bound: float = 0.2
    roi_x: List[float] = field(default_factory=lambda: [-1.0, 0.9])
    roi_y: List[float] = field(default_factory=lambda: [2.2, 7.1])
    x_extent: List[float] = field(default_factory=lambda: [-3.0, 3.0])
    y_extent: List[float] = field(default_factory=lambda: [0.0, 12.0])

    def validate(self):
        checks = [
            (min(self.num_bumps, self.num_potholes, self.num_cracks) >= 0, 'primitive counts must be non-negative'),
            (0 < self.max_amplitude <= self.e_bound,
             'amplitude {} must lie in (0, e_bound = {}]'.format(self.max_amplitude, self.e_bound)),
            (0 < self.min_radius <= self.max_radius, 'radius range must satisfy 0 < min_radius <= max_radius'),
            (0 <= self.max_tilt < math.pi / 4, 'max_tilt must lie in [0, pi/4)'),
            (self.roi_x[0] < self.roi_x[1] and self.roi_y[0] < self.roi_y[1], 'ROI is empty'),
            (self.x_extent[0] <= self.roi_x[0] and self.roi_x[1] <= self.x_extent[1]
             and self.y_extent[0] <= self.roi_y[0] and self.roi_y[1] <= self.y_extent[1],
             'scene extent must cover the ROI'),
        ]
        for ok, message in checks:
            if not ok:
                raise ArgumentError(message)
        return self

    @classmethod
    def from_config(cls, config, **overrides):
        params = cls(
            max_amplitude=config.max_amplitude,
            min_radius=config.min_radius,
            max_radius=config.max_radius,
            max_tilt=config.max_tilt,
            e_bound=config.e_bound,
            roi_x=list(config.x_range),
            roi_y=list(config.y_range),
            x_extent=list(config.scene_x_extent),
            y_extent=list(config.scene_y_extent),
        )
        for key, value in overrides.items():
            if value is not None:
                setattr(params, key, value)
        return params


def gen_scene(seed, params):
    """Sample a scene; the result depends only on ``seed`` and ``params``."""
    params.validate()
    rng = np.random.default_rng(seed)
    primitives = []
    kinds = ([PrimitiveKind.bump] * params.num_bumps + [PrimitiveKind.pothole] * params.num_potholes
             + [PrimitiveKind.crack] * params.num_cracks)
    for kind in kinds:
        center = (float(rng.uniform(*params.roi_x)), float(rng.uniform(*params.roi_y)))
        radius = float(rng.uniform(params.min_radius, params.max_radius))
        amplitude = float(rng.uniform(0.5, 1.0) * params.max_amplitude)
        angle = float(rng.uniform(0.0, math.pi)) if kind is PrimitiveKind.crack else 0.0
        if kind is not PrimitiveKind.bump:
            amplitude = -amplitude
        primitives.append(PrimitiveSpec(kind.name, center, radius, amplitude, angle))
    tilt_pitch, tilt_roll = (float(v) for v in rng.uniform(-params.max_tilt, params.max_tilt, size=2))
    pivot = (0.5 * (params.roi_x[0] + params.roi_x[1]), 0.5 * (params.roi_y[0] + params.roi_y[1]))
    scene = SceneSpec(
        seed=int(seed),
        tilt_pitch=tilt_pitch,
        tilt_roll=tilt_roll,
        primitives=tuple(primitives),
        x_extent=tuple(params.x_extent),
        y_extent=tuple(params.y_extent),
        pivot=pivot,
    )
    logger.debug(f"scene {seed}: {len(primitives)} primitives, tilt ({tilt_pitch:.4f}, {tilt_roll:.4f})")
    return scene


def flat_scene(params, seed=0):
    return SceneSpec(seed=seed, x_extent=tuple(params.x_extent), y_extent=tuple(params.y_extent))


def gt_elevation_map(scene, grid, dropout=0.0, seed=None):
    """Elevation at voxel-column centers; ``dropout`` hides a seeded random share of cells like sparse labels."""
    if not (scene.x_extent[0] <= grid.x_range[0] and grid.x_range[1] <= scene.x_extent[1]
            and scene.y_extent[0] <= grid.y_range[0] and grid.y_range[1] <= scene.y_extent[1]):
        raise ArgumentError('grid ROI {} x {} lies outside the scene extent {} x {}'.format(
            grid.x_range, grid.y_range, scene.x_extent, scene.y_extent))
    if not 0 <= dropout < 1:
        raise ArgumentError('dropout must lie in [0, 1), got {}'.format(dropout))
    xs, ys = np.meshgrid(grid.x_centers, grid.y_centers, indexing="ij")
    values = scene.elevation(xs, ys).astype(np.float32)
    mask = np.ones(values.shape, dtype=bool)
    if dropout > 0:
        rng = np.random.default_rng(scene.seed if seed is None else seed)
        mask = rng.random(values.shape) >= dropout
    return ElevationMap(values, mask)
