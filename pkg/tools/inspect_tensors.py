#!/usr/bin/env python
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

"""List every tensor below a weights, scene or LUT directory with its shape and value range."""

import os
import sys

import numpy as np

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), os.path.pardir)))

from roadelev.exceptions import DataError  # noqa: E402
from roadelev.numerics.tensor_io import data_file_path, load_tensor, read_manifest  # noqa: E402


def find_tensors(directory):
    """Prefixes of all tensors (manifest plus payload) below ``directory``, sorted."""
    prefixes = []
    for root, _, files in os.walk(directory):
        for name in files:
            if not name.endswith('.json'):
                continue
            prefix = os.path.join(root, name[:-len('.json')])
            if os.path.isfile(data_file_path(prefix)):
                prefixes.append(prefix)
    return sorted(prefixes)


def describe(prefix):
    manifest = read_manifest(prefix)
    values = load_tensor(prefix)
    stats = ''
    if values.size:
        v = values.astype(np.float64)
        stats = f' min={v.min():.6g} max={v.max():.6g} mean={v.mean():.6g}'
    return f'[tensor] {manifest["name"]} {manifest["dtype"]} {tuple(values.shape)}{stats}'


def main():
    if len(sys.argv) < 2:
        print(f'Usage: {sys.argv[0]} <directory>')
        exit(1)

    directory = sys.argv[1]
    if not os.path.isdir(directory):
        print(f'{directory} is not a valid directory')
        exit(1)

    for prefix in find_tensors(directory):
        try:
            print(f'{os.path.relpath(prefix, directory)}: {describe(prefix)}')
        except DataError as e:
            print(f'{os.path.relpath(prefix, directory)}: [broken] {e}')


if __name__ == "__main__":
    main()
