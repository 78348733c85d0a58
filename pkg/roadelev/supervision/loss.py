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

"""Masked cross-entropy objective over elevation bins and per-scale depth bins."""

from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from roadelev import logging
from roadelev.discretization import IGNORE_INDEX, elevation_to_target
from roadelev.exceptions import ArgumentError
from roadelev.numerics import as_tensor

logger = logging.get_logger(__name__)


def _log_probs(values, from_logits, atol):
    values = np.asarray(values, dtype=np.float64)
    if from_logits:
        shifted = values - values.max(axis=-1, keepdims=True)
        return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    if np.any(values < 0):
        raise ArgumentError('probabilities must be non-negative')
    deviation = np.abs(values.sum(axis=-1) - 1.0)
    if deviation.size and deviation.max() > atol:
        raise ArgumentError('probabilities are not normalized: max deviation {:.3g}'.format(deviation.max()))
    return np.log(np.maximum(values, np.finfo(np.float64).tiny))


def masked_ce_sum(values, targets, mask=None, from_logits=False, atol=1e-5):
    """(sum of -log p(target) over masked cells, number of masked cells)."""
    values = as_tensor(values)
    targets = np.asarray(targets)
    if targets.shape != values.shape[:-1]:
        raise ArgumentError('targets {} do not match predictions {}'.format(targets.shape, values.shape))
    if mask is None:
        mask = targets != IGNORE_INDEX
    mask = np.asarray(mask).astype(bool)
    if mask.shape != targets.shape:
        raise ArgumentError('mask {} does not match targets {}'.format(mask.shape, targets.shape))
    n = int(mask.sum())
    if n == 0:
        return 0.0, 0
    picked = targets[mask].astype(np.int64)
    num_classes = values.shape[-1]
    if picked.min() < 0 or picked.max() >= num_classes:
        raise ArgumentError('target index out of range [0, {}) on a masked cell'.format(num_classes))
    log_p = _log_probs(values[mask], from_logits, atol)
    return float(-log_p[np.arange(n), picked].sum()), n


def masked_ce(values, targets, mask=None, from_logits=False, atol=1e-5):
    """Mean over masked cells of -log p(target).

    ``values`` holds probabilities over the last axis, or logits when ``from_logits``. Without a mask every cell whose
    target is not ``IGNORE_INDEX`` counts. An empty mask gives 0 and logs a warning.
    """
    total, n = masked_ce_sum(values, targets, mask, from_logits, atol)
    if n == 0:
        logger.warning("masked cross-entropy over an empty mask is 0")
        return 0.0
    return total / n


def total_loss(E_prob, elev_targets, M_e, D_pre, depth_targets, M_d, beta=0.25):
    """Elevation CE plus ``beta`` times the equally weighted mean of the per-scale depth CEs.

    ``D_pre``, ``depth_targets`` and ``M_d`` are sequences (or stride-keyed dicts) with one entry per scale.
    """
    if beta < 0:
        raise ArgumentError('beta must be non-negative, got {}'.format(beta))
    if isinstance(D_pre, dict):
        keys = sorted(D_pre)
        D_pre, depth_targets, M_d = [D_pre[k] for k in keys], [depth_targets[k] for k in keys], [M_d[k] for k in keys]
    if not len(D_pre) == len(depth_targets) == len(M_d):
        raise ArgumentError('depth predictions, targets and masks disagree on the number of scales')
    elevation_term = masked_ce(E_prob, elev_targets, M_e)
    if not len(D_pre) or beta == 0:
        return elevation_term
    depth_term = sum(masked_ce(p, t, m) for p, t, m in zip(D_pre, depth_targets, M_d)) / len(D_pre)
    return elevation_term + beta * depth_term


def depth_targets(depth, mask, dspec):
    """One-hot depth targets at the nearest bin; pixels without ground truth or outside [d_min, d_max] are masked."""
    depth = np.asarray(depth, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool) & np.isfinite(depth)
    mask &= (depth >= dspec.d_min) & (depth <= dspec.d_max)
    target = np.where(mask, dspec.nearest_bin(np.where(mask, depth, dspec.d_min)), IGNORE_INDEX)
    return target.astype(np.int64), mask


@dataclass
class SupervisionBatch:
    elevation_targets: np.ndarray
    elevation_mask: np.ndarray
    depth_targets: Dict[int, np.ndarray] = field(default_factory=dict)
    depth_masks: Dict[int, np.ndarray] = field(default_factory=dict)
    beta: float = 0.25

    def __post_init__(self):
        if set(self.depth_targets) != set(self.depth_masks):
            raise ArgumentError('depth targets and masks cover different scales')
        for s in self.depth_targets:
            if self.depth_targets[s].shape != self.depth_masks[s].shape:
                raise ArgumentError('depth target and mask shapes differ at stride {}'.format(s))

    @classmethod
    def from_ground_truth(cls, E_gt, bins, depths, dspec, beta=0.25):
        """Build targets from an elevation map and a ``{stride: (depth, mask)}`` dict of rendered depths."""
        elevation = elevation_to_target(E_gt, bins)
        d_targets, d_masks = {}, {}
        for s, (depth, mask) in depths.items():
            d_targets[s], d_masks[s] = depth_targets(depth, mask, dspec)
        return cls(elevation, elevation != IGNORE_INDEX, d_targets, d_masks, beta)

    @classmethod
    def from_scene(cls, scene, config, camera=0):
        """Targets for one synthetic scene: GT elevation plus the depth rendered at every stride of ``camera``."""
        depths = {s: scene.depth(camera, s) for s in config.strides}
        return cls.from_ground_truth(scene.gt, config.bins(), depths, config.depth_spec(), config.beta)

    def loss(self, E_prob, D_pre):
        """``total_loss`` for an elevation distribution and a ``{stride: depth distribution}`` dict."""
        strides = sorted(self.depth_targets)
        missing = [s for s in strides if s not in D_pre]
        if missing:
            raise ArgumentError('depth predictions missing for strides {}'.format(missing))
        return total_loss(
            E_prob, self.elevation_targets, self.elevation_mask,
            [D_pre[s] for s in strides], [self.depth_targets[s] for s in strides],
            [self.depth_masks[s] for s in strides], self.beta)
