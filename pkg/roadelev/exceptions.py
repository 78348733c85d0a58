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

"""Exception hierarchy shared by the kernels, pipelines and the CLI."""


class RoadElevError(Exception):
    """Root of every error raised on purpose by roadelev."""


class ArgumentError(RoadElevError, ValueError):
    """Bad shapes, ranges or parameters passed to a kernel or pipeline stage."""


class PointBehindCameraError(ArgumentError):
    """A point projects with camera-frame depth at or below the near limit."""


class ConfigError(RoadElevError):
    """Invalid or missing configuration, rig or weight files."""


class DataError(RoadElevError):
    """Malformed or missing scene and tensor files at run time."""


class StageError(RoadElevError):
    """An error raised inside a named pipeline stage.

    The original exception is chained as ``__cause__``; ``stage`` names the stage.
    """

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__('[{}] {}: {}'.format(stage, type(cause).__name__, cause))
