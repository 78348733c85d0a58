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

"""Dense tensors are plain row-major numpy arrays; this module holds the helpers that check them."""

import numpy as np

from roadelev.exceptions import ArgumentError

# Pipelines run in float32, oracles in float64.
DenseTensor = np.ndarray

FLOAT_DTYPES = (np.float32, np.float64)


def as_tensor(data, dtype=None):
    """Return ``data`` as a C-contiguous float tensor.

    Float32 and float64 inputs keep their precision unless ``dtype`` is given; anything else becomes float32.
    """
    arr = np.asarray(data)
    if dtype is None:
        dtype = arr.dtype if arr.dtype in FLOAT_DTYPES else np.float32
    return np.ascontiguousarray(arr, dtype=dtype)


def check_rank(t, rank, name='tensor'):
    if t.ndim != rank:
        raise ArgumentError('{} must have rank {}, got shape {}'.format(name, rank, tuple(t.shape)))


def check_shape(t, shape, name='tensor'):
    """Check ``t.shape`` against ``shape``; ``None`` entries match any size."""
    if t.ndim != len(shape) or any(s is not None and s != d for s, d in zip(shape, t.shape)):
        raise ArgumentError('{} must have shape {}, got {}'.format(
            name, tuple('*' if s is None else s for s in shape), tuple(t.shape)))


def check_finite(t, name='tensor'):
    if not np.all(np.isfinite(t)):
        raise ArgumentError('{} contains NaN or Inf values'.format(name))
