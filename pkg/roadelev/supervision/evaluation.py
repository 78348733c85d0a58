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

"""Elevation error metrics in centimeters."""

from typing import NamedTuple

import numpy as np

from roadelev import logging
from roadelev.exceptions import ArgumentError

logger = logging.get_logger(__name__)

METERS_TO_CM = 100.0


class ErrorSums(NamedTuple):
    """float64 sums of |error|, error^2 and threshold exceedances over ``n`` cells, all in centimeters."""

    abs_sum: float
    sq_sum: float
    n_over: int
    n: int

    def __add__(self, other):
        return ErrorSums(self.abs_sum + other.abs_sum, self.sq_sum + other.sq_sum,
                         self.n_over + other.n_over, self.n + other.n)

    def summary(self):
        if self.n == 0:
            return {"abs_err_cm": None, "rmse_cm": None, "pct_gt_half_cm": None, "n_cells": 0}
        return {
            "abs_err_cm": self.abs_sum / self.n,
            "rmse_cm": float(np.sqrt(self.sq_sum / self.n)),
            "pct_gt_half_cm": 100.0 * self.n_over / self.n,
            "n_cells": self.n,
        }


def error_sums(E_pre, E_gt, threshold_cm=0.5):
    if E_pre.shape != E_gt.shape:
        raise ArgumentError('prediction {} and ground truth {} differ in shape'.format(E_pre.shape, E_gt.shape))
    mask = E_pre.mask & E_gt.mask
    err = (np.asarray(E_gt.values, dtype=np.float64)[mask] - np.asarray(E_pre.values, dtype=np.float64)[mask])
    err = np.abs(err) * METERS_TO_CM
    return ErrorSums(float(err.sum()), float(np.square(err).sum()), int((err > threshold_cm).sum()), int(err.size))


def metrics(E_pre, E_gt, threshold_cm=0.5):
    """Abs. error, RMSE and the percentage of cells with error above ``threshold_cm``, over the shared mask.

    An empty intersection gives ``None`` metrics with ``n_cells`` 0.
    """
    sums = error_sums(E_pre, E_gt, threshold_cm)
    if sums.n == 0:
        logger.warning("prediction and ground truth share no valid cell")
    return sums.summary()


def pooled_metrics(pairs, threshold_cm=0.5):
    """Metrics over the union of cells of several (prediction, ground truth) pairs."""
    total = ErrorSums(0.0, 0.0, 0, 0)
    for E_pre, E_gt in pairs:
        total = total + error_sums(E_pre, E_gt, threshold_cm)
    return total.summary()
