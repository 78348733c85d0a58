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

import unittest

import numpy as np
from parameterized import parameterized

from roadelev.discretization import (
    IGNORE_INDEX,
    ElevationMap,
    elevation_to_target,
    make_bins,
    regress_elevation,
    shuttle_bins,
    uniform_bins,
)
from roadelev.enums import BinMode
from roadelev.exceptions import ArgumentError
from roadelev.numerics import softmax
from roadelev.testing_utils import np_assert_close, np_assert_equal


class TestShuttleBins(unittest.TestCase):
    def test_hand_edges(self):
        bins = shuttle_bins(4, 0.2, 2.0)
        np_assert_close(bins.edges, [0.2, 0.05, 0.0, -0.05, -0.2], atol=1e-9)
        np_assert_close(bins.centers, [0.125, 0.025, -0.025, -0.125], atol=1e-9)
        self.assertEqual(bins.N, 4)
        self.assertIs(bins.mode, BinMode.shuttle)

    @parameterized.expand([(2,), (8,), (80,)])
    def test_linear_exponent_is_uniform(self, N):
        np_assert_close(shuttle_bins(N, 0.2, 1.0).edges, uniform_bins(N, 0.2).edges, atol=1e-12)

    def test_paper_layout(self):
        bins = make_bins("shuttle", 80, 0.2, 1.5)
        edges = bins.edges
        self.assertEqual(edges.shape, (81,))
        self.assertEqual(edges[0], 0.2)
        self.assertEqual(edges[-1], -0.2)
        self.assertEqual(edges[40], 0.0)
        self.assertTrue(np.all(np.diff(edges) < 0))
        widths = bins.widths
        np_assert_close(widths, widths[::-1], atol=1e-12)
        # narrowest bins hug zero elevation
        self.assertTrue(np.all(np.diff(widths[:40]) < 0))
        self.assertAlmostEqual(float(widths.sum()), 0.4, places=12)

    @parameterized.expand([(3,), (0,), (2.5,)])
    def test_bad_count(self, N):
        with self.assertRaises(ArgumentError):
            shuttle_bins(N, 0.2, 1.5)

    def test_bad_bounds(self):
        with self.assertRaises(ArgumentError):
            shuttle_bins(8, 0.0, 1.5)
        with self.assertRaises(ArgumentError):
            shuttle_bins(8, 0.2, 0.0)

    def test_make_bins_dispatch(self):
        self.assertIs(make_bins(BinMode.uniform, 5, 0.1).mode, BinMode.uniform)
        self.assertEqual(make_bins("uniform", 5, 0.1).N, 5)
        with self.assertRaises(ValueError):
            make_bins("log", 8, 0.2)

    def test_to_dict(self):
        expected = {"N": 8, "e_bound": 0.2, "alpha": 1.5, "mode": "shuttle"}
        self.assertEqual(shuttle_bins(8, 0.2, 1.5).to_dict(), expected)


class TestRegressElevation(unittest.TestCase):
    def setUp(self):
        self.bins = shuttle_bins(4, 0.2, 2.0)

    def test_one_hot_gives_centers(self):
        E_prob = np.eye(4, dtype=np.float32)[None]
        out = regress_elevation(E_prob, self.bins)
        np_assert_close(out.values[0], self.bins.centers, atol=1e-7)
        self.assertTrue(out.mask.all())

    def test_expectation(self):
        E_prob = np.array([[[0.5, 0.5, 0.0, 0.0], [0.0, 0.25, 0.25, 0.5]]])
        out = regress_elevation(E_prob, self.bins)
        np_assert_close(out.values, [[0.075, 0.25 * 0.025 - 0.25 * 0.025 - 0.5 * 0.125]], atol=1e-9)

    def test_uniform_distribution_is_zero(self):
        out = regress_elevation(np.full((3, 5, 4), 0.25), self.bins)
        np_assert_close(out.values, 0.0, atol=1e-12)

    def test_stays_within_bounds(self):
        bins = make_bins("shuttle", 80, 0.2, 1.5)
        E_prob = softmax(np.random.randn(16, 24, 80) * 5.0)
        values = regress_elevation(E_prob, bins).values
        self.assertTrue(np.all(np.abs(values) <= bins.centers[0] + 1e-6))

    def test_linear_in_probabilities(self):
        bins = make_bins("shuttle", 80, 0.2, 1.5)
        P = softmax(np.random.randn(4, 4, 80))
        Q = softmax(np.random.randn(4, 4, 80))
        mixed = regress_elevation(0.3 * P + 0.7 * Q, bins).values
        expected = 0.3 * regress_elevation(P, bins).values + 0.7 * regress_elevation(Q, bins).values
        np_assert_close(mixed, expected, atol=1e-6)

    def test_mask_is_carried(self):
        mask = np.array([[True, False]])
        out = regress_elevation(np.full((1, 2, 4), 0.25), self.bins, mask=mask)
        np_assert_equal(out.mask, mask)

    def test_rejects_bad_inputs(self):
        with self.assertRaises(ArgumentError):
            regress_elevation(np.full((2, 2, 4), 0.3), self.bins)
        with self.assertRaises(ArgumentError):
            regress_elevation(np.array([[[1.5, -0.5, 0.0, 0.0]]]), self.bins)
        with self.assertRaises(ArgumentError):
            regress_elevation(np.full((2, 2, 5), 0.2), self.bins)
        with self.assertRaises(ArgumentError):
            regress_elevation(np.full((2, 4), 0.25), self.bins)


class TestElevationTargets(unittest.TestCase):
    def setUp(self):
        self.bins = make_bins("shuttle", 80, 0.2, 1.5)

    def test_centers_map_to_themselves(self):
        E_gt = ElevationMap.full(self.bins.centers[None])
        np_assert_equal(elevation_to_target(E_gt, self.bins)[0], np.arange(80))

    def test_tie_goes_to_lower_index(self):
        mid = 0.5 * (self.bins.centers[2] + self.bins.centers[3])
        E_gt = ElevationMap.full(np.array([[self.bins.centers[3], mid]]))
        np_assert_equal(elevation_to_target(E_gt, self.bins), [[3, 2]])

    def test_clamps_outside_bounds(self):
        E_gt = ElevationMap.full(np.array([[0.5, -0.5, 0.0]]))
        np_assert_equal(elevation_to_target(E_gt, self.bins), [[0, 79, 39]])

    def test_invalid_cells_are_ignored(self):
        E_gt = ElevationMap(np.array([[0.01, np.nan, 0.02]]), np.array([[False, True, True]]))
        target = elevation_to_target(E_gt, self.bins)
        self.assertEqual(target[0, 0], IGNORE_INDEX)
        self.assertEqual(target[0, 1], IGNORE_INDEX)
        self.assertNotEqual(target[0, 2], IGNORE_INDEX)

    def test_nearest_center(self):
        values = np.random.uniform(-0.2, 0.2, size=(10, 10))
        target = elevation_to_target(ElevationMap.full(values), self.bins)
        nearest = np.abs(values[..., None] - self.bins.centers).argmin(axis=-1)
        np_assert_equal(target, nearest)

    def test_mask_shape_mismatch(self):
        with self.assertRaises(ArgumentError):
            ElevationMap(np.zeros((2, 3)), np.ones((3, 2), dtype=bool))
