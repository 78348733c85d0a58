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

import json
import os

import numpy as np

from roadelev.exceptions import ArgumentError, DataError
from roadelev.numerics import load_tensor, save_tensor, tensor_exists, write_pgm
from roadelev.numerics.tensor_io import data_file_path, manifest_file_path, read_manifest
from roadelev.testing_utils import TestCasePlus, np_assert_equal


class TestTensorFiles(TestCasePlus):
    def setUp(self):
        super().setUp()
        self.tmp_dir = self.get_auto_remove_tmp_dir()
        self.prefix = os.path.join(self.tmp_dir, "sub", "features_s4")

    def test_manifest_and_payload(self):
        values = np.arange(24, dtype=np.float32).reshape(2, 3, 4)
        save_tensor(self.prefix, values)
        with open(manifest_file_path(self.prefix)) as f:
            manifest = json.load(f)
        self.assertEqual(manifest, {"name": "features_s4", "dtype": "f32", "shape": [2, 3, 4]})
        self.assertEqual(os.path.getsize(data_file_path(self.prefix)), 24 * 4)
        with open(data_file_path(self.prefix), "rb") as f:
            raw = np.frombuffer(f.read(), dtype="<f4")
        np_assert_equal(raw, values.reshape(-1))
        loaded = load_tensor(self.prefix, expected_shape=(2, 3, 4))
        self.assertEqual(loaded.dtype, np.float32)
        np_assert_equal(loaded, values)

    def test_mask_as_u8(self):
        mask = np.array([[True, False], [False, True]])
        save_tensor(self.prefix, mask, dtype="u8")
        self.assertEqual(read_manifest(self.prefix)["dtype"], "u8")
        np_assert_equal(load_tensor(self.prefix).astype(bool), mask)

    def test_empty_tensor(self):
        save_tensor(self.prefix, np.zeros((0, 3)))
        self.assertEqual(load_tensor(self.prefix).shape, (0, 3))

    def test_unsupported_dtype(self):
        with self.assertRaises(ArgumentError):
            save_tensor(self.prefix, np.zeros(2), dtype="f16")

    def test_missing_files(self):
        self.assertFalse(tensor_exists(self.prefix))
        with self.assertRaises(DataError):
            load_tensor(self.prefix)
        save_tensor(self.prefix, np.zeros(3))
        os.remove(data_file_path(self.prefix))
        with self.assertRaises(DataError):
            load_tensor(self.prefix)

    def test_truncated_payload(self):
        save_tensor(self.prefix, np.zeros((4, 4)))
        with open(data_file_path(self.prefix), "r+b") as f:
            f.truncate(4 * 15)
        with self.assertRaises(DataError):
            load_tensor(self.prefix)

    def test_malformed_manifest(self):
        save_tensor(self.prefix, np.zeros(3))
        with open(manifest_file_path(self.prefix), "w") as f:
            f.write('{"name": "x", "shape": [3]}')
        with self.assertRaises(DataError):
            load_tensor(self.prefix)
        with open(manifest_file_path(self.prefix), "w") as f:
            f.write("not json")
        with self.assertRaises(DataError):
            load_tensor(self.prefix)

    def test_expected_shape_mismatch(self):
        save_tensor(self.prefix, np.zeros((2, 3)))
        with self.assertRaises(DataError):
            load_tensor(self.prefix, expected_shape=(3, 2))


class TestPgmPreview(TestCasePlus):
    def test_header_and_gray_levels(self):
        path = os.path.join(self.get_auto_remove_tmp_dir(), "elevation.pgm")
        values = np.array([[-0.2, 0.0, 0.2], [0.1, 5.0, -0.2]])
        mask = np.array([[True, True, True], [True, False, True]])
        write_pgm(path, values, mask, value_range=(-0.2, 0.2))
        with open(path, "rb") as f:
            data = f.read()
        header = b"P5\n3 2\n65535\n"
        self.assertTrue(data.startswith(header))
        pixels = np.frombuffer(data[len(header):], dtype=">u2").reshape(2, 3)
        self.assertEqual(int(pixels[0, 0]), 1)
        self.assertEqual(int(pixels[0, 2]), 65535)
        self.assertEqual(int(pixels[1, 1]), 0)
        self.assertEqual(int(pixels[0, 1]), 32768)

    def test_rejects_non_2d(self):
        with self.assertRaises(ArgumentError):
            write_pgm(os.path.join(self.get_auto_remove_tmp_dir(), "x.pgm"), np.zeros((2, 2, 2)))
