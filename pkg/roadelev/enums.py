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

import enum

class FusionMode(enum.Enum):
    concat = 1
    plus = 2

class BinMode(enum.Enum):
    shuttle = 1
    uniform = 2

class PipelineMode(enum.Enum):
    mono = 1
    stereo = 2

class CostVolumeType(enum.Enum):
    group_corr = 1
    group_diff = 2
    multiply = 3
    diff = 4

class PrimitiveKind(enum.Enum):
    bump = 1
    pothole = 2
    crack = 3

class ViewTransformType(enum.Enum):
    lut = 1
    reference = 2


def parse_enum(enum_cls, value):
    """Accept an enum member or its name; used by config loading and the CLI."""
    if isinstance(value, enum_cls):
        return value
    try:
        return enum_cls[value]
    except KeyError:
        raise ValueError('{} is not a valid {}, choose from {}'.format(
            value, enum_cls.__name__, [m.name for m in enum_cls]))
