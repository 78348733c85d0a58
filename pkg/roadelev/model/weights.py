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

"""Named weight tensors for the toy heads, encoders and stereo stages."""

import json
import math
import os

import numpy as np

from roadelev import logging
from roadelev.exceptions import ArgumentError, ConfigError
from roadelev.numerics.tensor_io import load_tensor, save_tensor, tensor_exists

logger = logging.get_logger(__name__)

INDEX_FILE = "weights.json"


def fan_in_init_method():
    """N(0, 1/sqrt(fan_in)) per tensor, keeping activations of random stacks at unit scale."""
    def init_(shape, rng):
        fan_in = int(np.prod(shape[1:])) if len(shape) > 1 else 1
        return rng.normal(0.0, 1.0 / math.sqrt(max(fan_in, 1)), size=shape).astype(np.float32)

    return init_


class Weights:
    """A flat ``name -> float32 array`` store with shape-checked access."""

    def __init__(self, tensors=None):
        self._tensors = {}
        for name, value in (tensors or {}).items():
            self[name] = value

    def __contains__(self, name):
        return name in self._tensors

    def __getitem__(self, name):
        try:
            return self._tensors[name]
        except KeyError:
            raise ArgumentError('missing weight tensor "{}"'.format(name))

    def __setitem__(self, name, value):
        self._tensors[name] = np.ascontiguousarray(value, dtype=np.float32)

    def __len__(self):
        return len(self._tensors)

    def names(self):
        return sorted(self._tensors)

    def items(self):
        return ((name, self._tensors[name]) for name in self.names())

    def get(self, name, shape=None):
        """Fetch ``name`` and check its shape; ``None`` entries of ``shape`` match anything."""
        t = self[name]
        if shape is not None:
            if t.ndim != len(shape) or any(s is not None and s != d for s, d in zip(shape, t.shape)):
                raise ArgumentError('weight "{}" has shape {}, expected {}'.format(
                    name, tuple(t.shape), tuple('*' if s is None else s for s in shape)))
        return t

    def optional(self, name, shape=None):
        return self.get(name, shape) if name in self else None

    def count(self, prefix):
        """Number of consecutive ``prefix{i}`` layers present, starting at 0."""
        n = 0
        while any(name.startswith('{}{}.'.format(prefix, n)) for name in self._tensors):
            n += 1
        return n

    def update(self, other):
        for name, value in other.items():
            self[name] = value
        return self

    def save(self, directory):
        os.makedirs(directory, exist_ok=True)
        for name, value in self.items():
            save_tensor(os.path.join(directory, name), value, name=name)
        with open(os.path.join(directory, INDEX_FILE), "w") as f:
            json.dump({"tensors": self.names()}, f, indent=2, sort_keys=True)
            f.write("\n")

    @classmethod
    def load(cls, directory):
        """Load a weights directory; a missing directory or tensor is a :class:`ConfigError`."""
        index = os.path.join(directory, INDEX_FILE)
        if not os.path.isfile(index):
            raise ConfigError('weights index {} does not exist'.format(index))
        with open(index) as f:
            names = json.load(f).get("tensors", [])
        weights = cls()
        for name in names:
            prefix = os.path.join(directory, name)
            if not tensor_exists(prefix):
                raise ConfigError('weights file {} is missing'.format(prefix))
            weights[name] = load_tensor(prefix)
        logger.info(f"loaded {len(weights)} weight tensors from {directory}")
        return weights


def init_weights(shapes, seed, init_method=None):
    """Random kernels, zero biases; deterministic in ``seed``."""
    init_method = init_method or fan_in_init_method()
    rng = np.random.default_rng(seed)
    weights = Weights()
    for name in sorted(shapes):
        shape = shapes[name]
        if name.endswith(".bias"):
            weights[name] = np.zeros(shape, dtype=np.float32)
        else:
            weights[name] = init_method(shape, rng)
    return weights


def zero_weights(shapes):
    return Weights({name: np.zeros(shape, dtype=np.float32) for name, shape in shapes.items()})


def head_weight_shapes(config):
    C_i = config.feature_channels
    shapes = {}
    for s in config.strides:
        shapes['feature_head.s{}.conv0.weight'.format(s)] = (C_i, 3, 3, 3)
        shapes['feature_head.s{}.conv0.bias'.format(s)] = (C_i,)
        shapes['feature_head.s{}.conv1.weight'.format(s)] = (C_i, C_i, 3, 3)
        shapes['feature_head.s{}.conv1.bias'.format(s)] = (C_i,)
        shapes['depth_head.s{}.weight'.format(s)] = (config.num_depth_bins, C_i, 3, 3)
        shapes['depth_head.s{}.bias'.format(s)] = (config.num_depth_bins,)
    return shapes


def mono_weight_shapes(config):
    shapes = head_weight_shapes(config)
    grid = config.make_grid()
    k = config.bev_kernel
    widths = [config.fused_channels * grid.N_z, config.bev_hidden, config.bev_hidden, config.num_bins]
    for i in range(3):
        shapes['bev_encoder.conv{}.weight'.format(i)] = (widths[i + 1], widths[i], k, k)
        shapes['bev_encoder.conv{}.bias'.format(i)] = (widths[i + 1],)
    return shapes


def stereo_weight_shapes(config):
    shapes = head_weight_shapes(config)
    shapes['sae.weight'] = (1, 2) + tuple(config.sae_kernel)
    shapes['sae.bias'] = (1,)
    shapes['cag.s'] = (1,)
    shapes['cag.epsilon'] = (1,)
    channels = config.volume_channels
    for i in range(config.num_initial_convs):
        shapes['agg.conv{}.weight'.format(i)] = (config.agg_hidden, channels, 3, 3, 3)
        shapes['agg.conv{}.bias'.format(i)] = (config.agg_hidden,)
        channels = config.agg_hidden
    for j in range(config.num_hourglass):
        prefix = 'agg.hourglass{}.'.format(j)
        shapes[prefix + 'down.weight'] = (channels, channels, 3, 3, 3)
        shapes[prefix + 'down.bias'] = (channels,)
        shapes[prefix + 'mid.weight'] = (channels, channels, 3, 3, 3)
        shapes[prefix + 'mid.bias'] = (channels,)
        # transposed-convolution layout (C_in, C_out, k, k, k)
        shapes[prefix + 'up.weight'] = (channels, channels, 3, 3, 3)
        shapes[prefix + 'up.bias'] = (channels,)
    shapes['agg.classifier.weight'] = (1, channels, 3, 3, 3)
    shapes['agg.classifier.bias'] = (1,)
    return shapes


def init_stereo_weights(config, seed):
    weights = init_weights(stereo_weight_shapes(config), seed)
    weights['cag.s'] = np.array([config.confidence_s], dtype=np.float32)
    weights['cag.epsilon'] = np.array([config.confidence_epsilon], dtype=np.float32)
    return weights


def init_mono_weights(config, seed):
    return init_weights(mono_weight_shapes(config), seed)


def load_weights(path):
    if path is None:
        raise ConfigError('no weights directory given')
    return Weights.load(path)
