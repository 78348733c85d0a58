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

"""Elevation bins and softmax-expectation regression.

Edges run from +e_bound down to -e_bound so that bin index grows with depth below the crest. The shuttle
layout puts narrow bins around zero elevation and wide bins towards the bounds:

    b_i = ((N' - i) / N')^alpha * e_bound        for i = 0 .. N'
    b_i = -((i - N') / N')^alpha * e_bound       for i = N' .. N

with N' = N / 2, and bin centers at edge midpoints.
"""

from dataclasses import dataclass

import numpy as np

from roadelev import logging
from roadelev.enums import BinMode, parse_enum
from roadelev.exceptions import ArgumentError
from roadelev.numerics.tensor import as_tensor, check_rank

logger = logging.get_logger(__name__)

# class index for cells without a valid target
IGNORE_INDEX = -1


@dataclass(frozen=True, eq=False)
class BinSpec:
    edges: np.ndarray
    centers: np.ndarray
    e_bound: float
    alpha: float
    mode: BinMode

    @property
    def N(self):
        return int(self.centers.shape[0])

    @property
    def widths(self):
        return self.edges[:-1] - self.edges[1:]

    def to_dict(self):
        return {"N": self.N, "e_bound": self.e_bound, "alpha": self.alpha, "mode": self.mode.name}


@dataclass(eq=False)
class ElevationMap:
    """(N_x, N_y) elevations in meters with a validity mask."""

    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        self.values = as_tensor(self.values)
        self.mask = np.asarray(self.mask, dtype=bool)
        check_rank(self.values, 2, 'elevation values')
        if self.mask.shape != self.values.shape:
            raise ArgumentError('elevation mask {} does not match values {}'.format(
                self.mask.shape, self.values.shape))

    @classmethod
    def full(cls, values):
        values = as_tensor(values)
        return cls(values, np.ones(values.shape, dtype=bool))

    @property
    def shape(self):
        return self.values.shape


def _make_spec(edges, e_bound, alpha, mode):
    edges = np.asarray(edges, dtype=np.float64)
    centers = 0.5 * (edges[:-1] + edges[1:])
    edges.setflags(write=False)
    centers.setflags(write=False)
    return BinSpec(edges=edges, centers=centers, e_bound=float(e_bound), alpha=float(alpha), mode=mode)


def shuttle_bins(N, e_bound, alpha):
    """Shuttle-shape bins: dense around zero, sparse towards +-e_bound."""
    if int(N) != N or N < 2 or N % 2:
        raise ArgumentError('shuttle bins need an even N >= 2, got {}'.format(N))
    if not e_bound > 0:
        raise ArgumentError('e_bound must be positive, got {}'.format(e_bound))
    if not alpha > 0:
        raise ArgumentError('alpha must be positive, got {}'.format(alpha))
    N = int(N)
    half = N // 2
    i = np.arange(N + 1, dtype=np.float64)
    upper = ((half - i[:half]) / half) ** alpha * e_bound
    lower = -((i[half + 1:] - half) / half) ** alpha * e_bound
    # the middle edge is pinned to +0.0
    edges = np.concatenate([upper, [0.0], lower])
    return _make_spec(edges, e_bound, alpha, BinMode.shuttle)


def uniform_bins(N, e_bound):
    if int(N) != N or N < 1:
        raise ArgumentError('uniform bins need N >= 1, got {}'.format(N))
    if not e_bound > 0:
        raise ArgumentError('e_bound must be positive, got {}'.format(e_bound))
    N = int(N)
    edges = e_bound * (N - 2.0 * np.arange(N + 1, dtype=np.float64)) / N
    if N % 2 == 0:
        edges[N // 2] = 0.0
    return _make_spec(edges, e_bound, 1.0, BinMode.uniform)


def make_bins(mode, N, e_bound, alpha=1.5):
    mode = parse_enum(BinMode, mode)
    if mode is BinMode.shuttle:
        return shuttle_bins(N, e_bound, alpha)
    return uniform_bins(N, e_bound)


def regress_elevation(E_prob, bins: BinSpec, mask=None, atol=1e-5):
    """E_pre(x, y) = sum_i e_i * E_prob(x, y, i)."""
    E_prob = as_tensor(E_prob)
    check_rank(E_prob, 3, 'E_prob')
    if E_prob.shape[-1] != bins.N:
        raise ArgumentError('E_prob has {} bins, BinSpec has {}'.format(E_prob.shape[-1], bins.N))
    if np.any(E_prob < 0):
        raise ArgumentError('E_prob has negative entries')
    totals = E_prob.sum(axis=-1, dtype=np.float64)
    if np.any(np.abs(totals - 1.0) > atol):
        raise ArgumentError('E_prob is not normalized: max deviation {:.3g}'.format(np.abs(totals - 1.0).max()))
    values = (E_prob.astype(np.float64) @ bins.centers).astype(E_prob.dtype)
    if mask is None:
        mask = np.ones(values.shape, dtype=bool)
    return ElevationMap(values, mask)


def elevation_to_target(E_gt: ElevationMap, bins: BinSpec):
    """Nearest-center class index per valid cell; ties go to the lower index; invalid cells get IGNORE_INDEX."""
    values = np.asarray(E_gt.values, dtype=np.float64)
    # midpoints between consecutive (descending) centers; the index is the count of midpoints strictly above
    midpoints = 0.5 * (bins.centers[:-1] + bins.centers[1:])
    target = np.searchsorted(-midpoints, -values, side="left").astype(np.int64)
    valid = E_gt.mask & np.isfinite(values)
    target = np.where(valid, target, IGNORE_INDEX)
    return target
