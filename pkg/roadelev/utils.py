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

"""General utilities."""

import contextlib
import time

from roadelev import logging
from roadelev.exceptions import RoadElevError, StageError

logger = logging.get_logger(__name__)


@contextlib.contextmanager
def stage(name, timers=None):
    """Run a pipeline stage; errors leave it as :class:`StageError` naming the stage.

    Nested stages keep the innermost name.
    """
    logger.debug(f"stage {name}: start")
    if timers is not None:
        timers(name).start()
    started = time.perf_counter()
    try:
        yield
    except StageError:
        raise
    except (RoadElevError, ValueError) as e:
        logger.error(f"stage {name} failed: {e}")
        raise StageError(name, e) from e
    finally:
        if timers is not None and timers(name).started_:
            timers(name).stop()
    logger.debug(f"stage {name}: done in {(time.perf_counter() - started) * 1000.0:.2f} ms")


def unwrap_stage_error(exc):
    """Return the innermost non-stage exception of a chain."""
    while isinstance(exc, StageError):
        exc = exc.cause
    return exc
