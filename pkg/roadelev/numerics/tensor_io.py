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

"""Tensor file format.

A tensor ``prefix`` is stored as two files:

* ``prefix.json``: manifest ``{"name": ..., "dtype": "f32", "shape": [...]}``
* ``prefix.bin``: the flat row-major little-endian payload

Weights, feature maps, depth maps, elevation maps and dumps all use it.
"""

import json
import os

import numpy as np

from roadelev import logging
from roadelev.exceptions import ArgumentError, DataError

logger = logging.get_logger(__name__)

dtypes = {
    "f32": np.dtype("<f4"),
    "f64": np.dtype("<f8"),
    "i32": np.dtype("<i4"),
    "u8": np.dtype("u1"),
}


def manifest_file_path(prefix_path):
    return str(prefix_path) + '.json'


def data_file_path(prefix_path):
    return str(prefix_path) + '.bin'


def tensor_exists(prefix_path):
    return os.path.exists(manifest_file_path(prefix_path)) and os.path.exists(data_file_path(prefix_path))


def save_tensor(prefix_path, array, name=None, dtype="f32"):
    """Write ``array`` as ``prefix_path.json`` + ``prefix_path.bin``."""
    if dtype not in dtypes:
        raise ArgumentError('unsupported tensor dtype {}, choose from {}'.format(dtype, list(dtypes)))
    array = np.ascontiguousarray(array, dtype=dtypes[dtype])
    if name is None:
        name = os.path.basename(str(prefix_path))
    manifest = {"name": name, "dtype": dtype, "shape": [int(s) for s in array.shape]}
    directory = os.path.dirname(str(prefix_path))
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(manifest_file_path(prefix_path), "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    with open(data_file_path(prefix_path), "wb") as f:
        f.write(array.tobytes(order="C"))


def read_manifest(prefix_path):
    path = manifest_file_path(prefix_path)
    try:
        with open(path) as f:
            manifest = json.load(f)
    except FileNotFoundError:
        raise DataError('missing tensor manifest {}'.format(path))
    except json.JSONDecodeError as e:
        raise DataError('malformed tensor manifest {}: {}'.format(path, e))
    for key in ("name", "dtype", "shape"):
        if key not in manifest:
            raise DataError('tensor manifest {} lacks "{}"'.format(path, key))
    if manifest["dtype"] not in dtypes:
        raise DataError('tensor manifest {} has unsupported dtype {}'.format(path, manifest["dtype"]))
    if any(int(s) < 0 for s in manifest["shape"]):
        raise DataError('tensor manifest {} has a negative dimension'.format(path))
    return manifest


def load_tensor(prefix_path, expected_shape=None):
    """Read a tensor written by :func:`save_tensor`; payload size must match the manifest."""
    manifest = read_manifest(prefix_path)
    dtype = dtypes[manifest["dtype"]]
    shape = tuple(int(s) for s in manifest["shape"])
    path = data_file_path(prefix_path)
    try:
        payload = np.fromfile(path, dtype=dtype)
    except FileNotFoundError:
        raise DataError('missing tensor payload {}'.format(path))
    if payload.size != int(np.prod(shape, dtype=np.int64)):
        raise DataError('tensor payload {} holds {} values, manifest shape {} needs {}'.format(
            path, payload.size, shape, int(np.prod(shape, dtype=np.int64))))
    array = payload.reshape(shape).astype(dtype.newbyteorder("="), copy=False)
    if expected_shape is not None and tuple(expected_shape) != shape:
        raise DataError('tensor {} has shape {}, expected {}'.format(prefix_path, shape, tuple(expected_shape)))
    logger.debug(f"loaded tensor {manifest['name']} {shape} from {prefix_path}")
    return array


def write_pgm(path, values, mask=None, value_range=None):
    """Write a binary 16-bit PGM preview; valid values map affinely onto 1..65535, invalid cells are 0."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2:
        raise ArgumentError('PGM preview needs a 2D map, got shape {}'.format(values.shape))
    if mask is None:
        mask = np.isfinite(values)
    mask = np.asarray(mask, dtype=bool) & np.isfinite(values)
    if value_range is None:
        if mask.any():
            value_range = (float(values[mask].min()), float(values[mask].max()))
        else:
            value_range = (0.0, 1.0)
    lo, hi = value_range
    span = hi - lo if hi > lo else 1.0
    gray = np.zeros(values.shape, dtype=np.float64)
    gray[mask] = 1.0 + np.clip((values[mask] - lo) / span, 0.0, 1.0) * 65534.0
    pixels = np.rint(gray).astype(">u2")
    height, width = values.shape
    directory = os.path.dirname(str(path))
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "wb") as f:
        f.write("P5\n{} {}\n65535\n".format(width, height).encode("ascii"))
        f.write(pixels.tobytes())
