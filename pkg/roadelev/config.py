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

"""Pipeline configuration.

A configuration is a flat JSON object whose keys are the fields of :class:`PipelineConfig`. A file may name a
shipped ``profile`` ("paper" or "desk") and override only some keys. Everything is validated at load time.
"""

import dataclasses
import json
import math
import os
from dataclasses import dataclass, field
from typing import List, Optional

from roadelev import logging
from roadelev.discretization import make_bins
from roadelev.enums import BinMode, CostVolumeType, FusionMode, ViewTransformType, parse_enum
from roadelev.exceptions import ArgumentError, ConfigError
from roadelev.geometry import CameraIntrinsics, make_grid, stereo_rigs
from roadelev.view_transform import DepthBinSpec, feature_dims

logger = logging.get_logger(__name__)

PROFILE_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "configs")
PROFILES = ("paper", "desk")


@dataclass
class PipelineConfig:
    profile: str = "desk"

    # road region of interest and voxel size, meters
    x_range: List[float] = field(default_factory=lambda: [-1.0, 0.9])
    y_range: List[float] = field(default_factory=lambda: [2.2, 7.1])
    z_range: List[float] = field(default_factory=lambda: [-0.2, 0.2])
    x_res: float = 0.11875
    y_res: float = 0.2041666666666667
    z_res: float = 0.05

    # camera
    image_width: int = 384
    image_height: int = 256
    fx: float = 320.0
    fy: float = 320.0
    cx: float = 192.0
    cy: float = 128.0
    camera_height: float = 1.0
    camera_pitch_deg: float = 12.0
    baseline: float = 0.12

    # depth bins
    d_min: float = 1.0
    d_max: float = 9.0
    num_depth_bins: int = 64

    # elevation bins
    num_bins: int = 80
    e_bound: float = 0.2
    alpha: float = 1.5
    bin_mode: str = "shuttle"

    # mono model
    strides: List[int] = field(default_factory=lambda: [4, 8, 16])
    feature_channels: int = 8
    fusion_mode: str = "concat"
    bev_hidden: int = 32
    bev_kernel: int = 3
    view_transform: str = "lut"
    use_depth: bool = True
    min_depth_evidence: float = 1.02

    # stereo model
    num_groups: int = 8
    cost_volume: str = "group_corr"
    use_sae: bool = True
    use_cag: bool = True
    sae_kernel: List[int] = field(default_factory=lambda: [1, 7, 7])
    confidence_s: float = -1.0
    confidence_epsilon: float = 0.0
    agg_hidden: int = 8
    num_initial_convs: int = 2
    num_hourglass: int = 1

    # supervision
    beta: float = 0.25

    # synthetic scenes
    scene_x_extent: List[float] = field(default_factory=lambda: [-3.0, 3.0])
    scene_y_extent: List[float] = field(default_factory=lambda: [0.0, 12.0])
    max_amplitude: float = 0.05
    min_radius: float = 0.25
    max_radius: float = 0.5
    max_tilt: float = 0.0
    oracle_depth_sigma: float = 1.5
    depth_noise: float = 0.01
    feature_noise: float = 0.01
    label_dropout: float = 0.0

    # acceptance bounds, centimeters
    flat_scene_bound_cm: float = 0.5
    synthetic_bound_cm: float = 1.0

    # runtime
    seed: int = 1234
    threads: Optional[int] = None
    mono_weights: Optional[str] = None
    stereo_weights: Optional[str] = None
    bench_repetitions: int = 50
    bench_warmup: int = 5

    # ----------------------------------------------------------------- derived objects

    @property
    def fusion(self):
        return parse_enum(FusionMode, self.fusion_mode)

    @property
    def cost_volume_type(self):
        return parse_enum(CostVolumeType, self.cost_volume)

    @property
    def view_transform_type(self):
        return parse_enum(ViewTransformType, self.view_transform)

    @property
    def camera_pitch(self):
        return math.radians(self.camera_pitch_deg)

    def make_grid(self):
        return make_grid((self.x_range, self.y_range, self.z_range), (self.x_res, self.y_res, self.z_res))

    def depth_spec(self):
        return DepthBinSpec(float(self.d_min), float(self.d_max), int(self.num_depth_bins))

    def bins(self):
        return make_bins(self.bin_mode, self.num_bins, self.e_bound, self.alpha)

    def intrinsics(self):
        return CameraIntrinsics(float(self.fx), float(self.fy), float(self.cx), float(self.cy),
                                int(self.image_width), int(self.image_height))

    def feature_dims(self, stride):
        return feature_dims(self.intrinsics(), stride)

    def rigs(self):
        """(left, right) rectified stereo rigs; the mono pipeline uses the left one."""
        return stereo_rigs(self.intrinsics(), self.camera_height, self.camera_pitch, self.baseline)

    @property
    def fused_channels(self):
        if self.fusion is FusionMode.concat:
            return self.feature_channels * len(self.strides)
        return self.feature_channels

    @property
    def volume_channels(self):
        """Channel count of the cost volume fed to aggregation."""
        if self.cost_volume_type in (CostVolumeType.group_corr, CostVolumeType.group_diff):
            return self.num_groups
        return self.fused_channels

    # ----------------------------------------------------------------- validation and IO

    def validate(self):
        """Check every module precondition; raises :class:`ConfigError`."""
        try:
            parse_enum(BinMode, self.bin_mode)
            self.fusion
            self.cost_volume_type
            self.view_transform_type
        except ValueError as e:
            raise ConfigError(str(e))
        try:
            grid = self.make_grid()
            self.depth_spec()
            self.bins()
            for stride in self.strides:
                self.feature_dims(stride)
            self.rigs()
        except ArgumentError as e:
            raise ConfigError(str(e))

        checks = [
            (len(self.strides) >= 1, 'at least one feature stride is required'),
            (len(set(self.strides)) == len(self.strides), 'strides must be distinct'),
            (self.feature_channels >= 1, 'feature_channels must be positive'),
            (self.bev_hidden >= 1 and self.agg_hidden >= 1, 'hidden widths must be positive'),
            (self.bev_kernel >= 1 and self.bev_kernel % 2 == 1, 'bev_kernel must be odd'),
            (self.num_groups >= 1 and self.fused_channels % self.num_groups == 0,
             'num_groups {} must divide the fused channel count {}'.format(self.num_groups, self.fused_channels)),
            (len(self.sae_kernel) == 3 and all(k >= 1 and k % 2 == 1 for k in self.sae_kernel),
             'sae_kernel must be three odd sizes'),
            (self.num_initial_convs >= 0 and self.num_hourglass >= 0, 'layer counts must be non-negative'),
            (self.beta >= 0, 'beta must be non-negative'),
            (0 < self.max_amplitude <= self.e_bound, 'max_amplitude must lie in (0, e_bound]'),
            (0 < self.min_radius <= self.max_radius, 'radius range must satisfy 0 < min_radius <= max_radius'),
            (self.max_tilt >= 0, 'max_tilt must be non-negative'),
            (self.scene_x_extent[0] <= grid.x_range[0] and self.scene_x_extent[1] >= grid.x_range[1]
             and self.scene_y_extent[0] <= grid.y_range[0] and self.scene_y_extent[1] >= grid.y_range[1],
             'the scene extent must cover the grid ROI'),
            (self.min_depth_evidence >= 0, 'min_depth_evidence must be non-negative'),
            (self.oracle_depth_sigma > 0, 'oracle_depth_sigma must be positive'),
            (self.depth_noise >= 0 and self.feature_noise >= 0, 'noise levels must be non-negative'),
            (0 <= self.label_dropout < 1, 'label_dropout must lie in [0, 1)'),
            (self.threads is None or self.threads >= 1, 'threads must be positive'),
            (self.bench_repetitions >= 1 and self.bench_warmup >= 0, 'benchmark counts must be positive'),
            (0 < self.camera_height and -90 < self.camera_pitch_deg < 90, 'camera mount is degenerate'),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        return self

    def to_dict(self):
        return dataclasses.asdict(self)

    def save(self, path):
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError('unknown configuration keys: {}'.format(unknown))
        return cls(**d)


def _read_json(path):
    try:
        with open(path) as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ConfigError('config file {} does not exist'.format(path))
    except json.JSONDecodeError as e:
        raise ConfigError('config file {} is not valid JSON: {}'.format(path, e))
    if not isinstance(data, dict):
        raise ConfigError('config file {} must hold a JSON object'.format(path))
    return data


def profile_path(name):
    if name not in PROFILES:
        raise ConfigError('unknown profile {!r}, choose from {}'.format(name, list(PROFILES)))
    return os.path.join(PROFILE_DIR, name + ".json")


def load_config(source=None, overrides=None):
    """Load a profile name or JSON path, apply ``overrides`` (``None`` values are ignored) and validate."""
    source = source or "desk"
    if source in PROFILES:
        data = _read_json(profile_path(source))
    else:
        data = _read_json(source)
        base = data.get("profile", "desk")
        merged = _read_json(profile_path(base)) if base in PROFILES else {}
        merged.update(data)
        data = merged
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    config = PipelineConfig.from_dict(data)
    return config.validate()
