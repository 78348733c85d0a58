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

import math
import unittest

import numpy as np
from parameterized import parameterized

from roadelev import logging
from roadelev.discretization import IGNORE_INDEX, ElevationMap, make_bins
from roadelev.exceptions import ArgumentError
from roadelev.supervision import (
    SupervisionBatch,
    depth_targets,
    error_sums,
    masked_ce,
    metrics,
    pooled_metrics,
    total_loss,
)
from roadelev.testing_utils import CaptureLogger, np_assert_equal, require_torch, set_seed
from roadelev.view_transform import DepthBinSpec

set_seed(42)


def one_hot(targets, num_classes):
    return np.eye(num_classes)[targets]


class TestMaskedCrossEntropy(unittest.TestCase):
    def test_perfect_prediction(self):
        targets = np.array([[0, 3], [2, 1]])
        self.assertEqual(masked_ce(one_hot(targets, 4), targets), 0.0)

    @parameterized.expand([(2,), (80,)])
    def test_uniform_is_log_n(self, N):
        targets = np.random.randint(0, N, size=(3, 4))
        self.assertAlmostEqual(masked_ce(np.full((3, 4, N), 1.0 / N), targets), math.log(N), places=6)

    def test_mask_selects_cells(self):
        probs = np.array([[[1.0, 0.0], [0.5, 0.5]]])
        targets = np.array([[0, 0]])
        self.assertAlmostEqual(masked_ce(probs, targets, np.array([[False, True]])), math.log(2), places=12)
        self.assertEqual(masked_ce(probs, targets, np.array([[True, False]])), 0.0)

    def test_ignore_index_is_masked(self):
        probs = np.array([[[1.0, 0.0], [0.5, 0.5]]])
        self.assertEqual(masked_ce(probs, np.array([[0, IGNORE_INDEX]])), 0.0)

    def test_empty_mask_warns(self):
        logging.set_verbosity_warning()
        logger = logging.get_logger("roadelev.supervision.loss")
        with CaptureLogger(logger) as cl:
            value = masked_ce(np.full((2, 2, 3), 1.0 / 3), np.zeros((2, 2), dtype=int), np.zeros((2, 2), dtype=bool))
        self.assertEqual(value, 0.0)
        self.assertIn("empty mask", cl.out)

    def test_from_logits(self):
        logits = np.random.randn(4, 5, 6)
        probs = np.exp(logits) / np.exp(logits).sum(axis=-1, keepdims=True)
        targets = np.random.randint(0, 6, size=(4, 5))
        self.assertAlmostEqual(masked_ce(logits, targets, from_logits=True), masked_ce(probs, targets), places=6)

    def test_decreases_toward_target(self):
        targets = np.array([[1]])
        previous = math.inf
        for p in np.linspace(0.1, 0.99, 12):
            rest = (1.0 - p) / 3
            value = masked_ce(np.array([[[rest, p, rest, rest]]]), targets)
            self.assertLess(value, previous)
            previous = value

    def test_errors(self):
        probs = np.full((1, 2, 3), 1.0 / 3)
        with self.assertRaises(ArgumentError):
            masked_ce(probs, np.array([[0, 3]]))
        with self.assertRaises(ArgumentError):
            masked_ce(np.full((1, 2, 3), 0.5), np.array([[0, 1]]))
        with self.assertRaises(ArgumentError):
            masked_ce(probs, np.array([0, 1]))

    @require_torch
    def test_matches_torch(self):
        import torch
        import torch.nn.functional as F

        logits = np.random.randn(6, 7, 10)
        targets = np.random.randint(0, 10, size=(6, 7))
        mask = np.random.rand(6, 7) > 0.3
        expected = F.cross_entropy(torch.from_numpy(logits[mask]), torch.from_numpy(targets[mask]))
        self.assertAlmostEqual(masked_ce(logits, targets, mask, from_logits=True), expected.item(), places=5)


class TestTotalLoss(unittest.TestCase):
    def setUp(self):
        # cross-entropy 1 on the elevation cell, 2 on the depth cell
        self.E_prob = np.array([[[math.exp(-1.0), 1.0 - math.exp(-1.0)]]])
        self.D_pre = np.array([[[math.exp(-2.0), 1.0 - math.exp(-2.0)]]])
        self.target = np.array([[0]])
        self.mask = np.array([[True]])

    def test_composition(self):
        loss = total_loss(self.E_prob, self.target, self.mask, [self.D_pre], [self.target], [self.mask], beta=0.25)
        self.assertAlmostEqual(loss, 1.5, places=12)

    def test_scales_are_averaged(self):
        perfect = one_hot(self.target, 2)
        loss = total_loss(self.E_prob, self.target, self.mask, {4: self.D_pre, 8: perfect},
                          {4: self.target, 8: self.target}, {4: self.mask, 8: self.mask}, beta=0.25)
        self.assertAlmostEqual(loss, 1.25, places=12)

    def test_zero_beta(self):
        loss = total_loss(self.E_prob, self.target, self.mask, [self.D_pre], [self.target], [self.mask], beta=0.0)
        self.assertAlmostEqual(loss, 1.0, places=12)

    def test_errors(self):
        with self.assertRaises(ArgumentError):
            total_loss(self.E_prob, self.target, self.mask, [self.D_pre], [self.target], [self.mask], beta=-1.0)
        with self.assertRaises(ArgumentError):
            total_loss(self.E_prob, self.target, self.mask, [self.D_pre], [], [self.mask])


class TestTargets(unittest.TestCase):
    def test_depth_targets(self):
        dspec = DepthBinSpec(1.0, 9.0, 64)
        depth = np.array([[1.0, 1.2, 9.0], [0.5, np.nan, 20.0]])
        mask = np.array([[True, True, True], [True, True, True]])
        target, valid = depth_targets(depth, mask, dspec)
        np_assert_equal(valid, [[True, True, True], [False, False, False]])
        np_assert_equal(target, [[0, 1, 63], [IGNORE_INDEX] * 3])

    def test_batch_from_ground_truth(self):
        bins = make_bins("shuttle", 8, 0.2, 1.5)
        dspec = DepthBinSpec(1.0, 9.0, 16)
        E_gt = ElevationMap(np.array([[0.0, 0.1], [-0.1, 0.3]]), np.array([[True, True], [True, False]]))
        depth = np.array([[2.0, 3.0], [4.0, 5.0]])
        batch = SupervisionBatch.from_ground_truth(E_gt, bins, {4: (depth, np.ones((2, 2), bool))}, dspec)
        np_assert_equal(batch.elevation_mask, E_gt.mask)
        self.assertEqual(batch.elevation_targets[1, 1], IGNORE_INDEX)
        E_prob = one_hot(np.maximum(batch.elevation_targets, 0), 8)
        D_pre = {4: one_hot(batch.depth_targets[4], 16)}
        self.assertEqual(batch.loss(E_prob, D_pre), 0.0)
        with self.assertRaises(ArgumentError):
            batch.loss(E_prob, {})

    def test_batch_checks_scales(self):
        with self.assertRaises(ArgumentError):
            SupervisionBatch(np.zeros((2, 2), int), np.ones((2, 2), bool), {4: np.zeros((2, 2), int)}, {})


class TestMetrics(unittest.TestCase):
    def setUp(self):
        self.gt = ElevationMap.full(np.random.uniform(-0.1, 0.1, size=(8, 9)))

    def test_identity(self):
        result = metrics(self.gt, self.gt)
        self.assertEqual((result["abs_err_cm"], result["rmse_cm"], result["pct_gt_half_cm"]), (0.0, 0.0, 0.0))
        self.assertEqual(result["n_cells"], 72)

    def test_constant_offset(self):
        result = metrics(ElevationMap.full(self.gt.values + 0.01), self.gt)
        self.assertAlmostEqual(result["abs_err_cm"], 1.0, places=6)
        self.assertAlmostEqual(result["rmse_cm"], 1.0, places=6)
        self.assertEqual(result["pct_gt_half_cm"], 100.0)

    def test_mixed_errors(self):
        gt = ElevationMap.full(np.zeros((1, 2)))
        result = metrics(ElevationMap.full(np.array([[0.0, 0.02]])), gt)
        self.assertAlmostEqual(result["abs_err_cm"], 1.0, places=9)
        self.assertAlmostEqual(result["rmse_cm"], math.sqrt(2.0), places=9)
        self.assertEqual(result["pct_gt_half_cm"], 50.0)

    def test_rmse_dominates_abs(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            pred = ElevationMap.full(rng.normal(0.0, 0.05, size=(4, 4)))
            result = metrics(pred, ElevationMap.full(rng.normal(0.0, 0.05, size=(4, 4))))
            self.assertGreaterEqual(result["rmse_cm"], result["abs_err_cm"] - 1e-12)

    def test_shared_mask(self):
        pred = ElevationMap(np.array([[0.0, 0.5]]), np.array([[True, False]]))
        gt = ElevationMap(np.array([[0.0, 0.0]]), np.array([[True, True]]))
        self.assertEqual(metrics(pred, gt)["n_cells"], 1)
        self.assertEqual(metrics(pred, gt)["abs_err_cm"], 0.0)

    def test_empty_intersection(self):
        logging.set_verbosity_warning()
        pred = ElevationMap(np.zeros((8, 9)), np.zeros((8, 9), bool))
        with CaptureLogger(logging.get_logger("roadelev.supervision.evaluation")) as cl:
            result = metrics(pred, self.gt)
        self.assertEqual(result, {"abs_err_cm": None, "rmse_cm": None, "pct_gt_half_cm": None, "n_cells": 0})
        self.assertIn("share no valid cell", cl.out)

    def test_pooled(self):
        gt = ElevationMap.full(np.zeros((1, 2)))
        pairs = [(ElevationMap.full(np.array([[0.0, 0.0]])), gt), (ElevationMap.full(np.array([[0.02, 0.02]])), gt)]
        result = pooled_metrics(pairs)
        self.assertEqual(result["n_cells"], 4)
        self.assertAlmostEqual(result["abs_err_cm"], 1.0, places=9)
        sums = error_sums(*pairs[1])
        self.assertEqual(sums.n_over, 2)

    def test_shape_mismatch(self):
        with self.assertRaises(ArgumentError):
            metrics(ElevationMap.full(np.zeros((2, 2))), ElevationMap.full(np.zeros((2, 3))))
