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

"""Thread-pool helpers for data-parallel kernels.

Chunk boundaries depend only on the problem size and the grain, never on the
thread count, and every chunk writes a disjoint output slice, so results are
bitwise identical for any number of threads.
"""

import os
import threading
from concurrent.futures import ThreadPoolExecutor

from roadelev import logging

logger = logging.get_logger(__name__)

NUM_THREADS_ENV = "ROADELEV_NUM_THREADS"

_NUM_THREADS = None
_lock = threading.Lock()


def _default_num_threads():
    env = os.getenv(NUM_THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            logger.warning(f"ignoring {NUM_THREADS_ENV}={env}, expected an integer")
    return max(1, os.cpu_count() or 1)


def set_num_threads(num_threads):
    """Cap the number of worker threads; ``None`` restores the default."""
    global _NUM_THREADS
    if num_threads is not None:
        assert int(num_threads) >= 1, 'thread count must be positive, got {}'.format(num_threads)
        num_threads = int(num_threads)
    with _lock:
        _NUM_THREADS = num_threads


def get_num_threads():
    with _lock:
        if _NUM_THREADS is None:
            return _default_num_threads()
        return _NUM_THREADS


def chunk_ranges(n, grain):
    assert grain >= 1, 'grain must be positive, got {}'.format(grain)
    return [(start, min(start + grain, n)) for start in range(0, n, grain)]


def parallel_for(n, fn, grain=4096):
    """Call ``fn(start, stop)`` for every chunk of ``range(n)``."""
    ranges = chunk_ranges(n, grain)
    num_threads = min(get_num_threads(), len(ranges))
    if num_threads <= 1:
        for start, stop in ranges:
            fn(start, stop)
        return
    with ThreadPoolExecutor(max_workers=num_threads) as executor:
        # list() re-raises the first worker exception here
        list(executor.map(lambda r: fn(*r), ranges))
