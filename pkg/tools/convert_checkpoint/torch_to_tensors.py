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

"""Convert a PyTorch ``state_dict`` checkpoint into a roadelev weights directory.

Conv2d, Conv3d and ConvTranspose3d weights already use the roadelev layouts ((C_out, C_in, k...) and
(C_in, C_out, k...) respectively), so tensors are copied as float32 under their (optionally renamed) keys.
"""

import argparse
import os
import sys
from collections import OrderedDict

import torch

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), os.path.pardir, os.path.pardir)))

from roadelev.model import Weights  # noqa: E402

STATE_DICT_KEYS = ('state_dict', 'model')


def parse_arguments(argv=None):
    parser = argparse.ArgumentParser(description='Convert a PyTorch checkpoint to a roadelev weights directory')
    parser.add_argument('--input_file', required=True, type=str, help='PyTorch checkpoint file')
    parser.add_argument('--output_folder', required=True, type=str, help='Output weights directory')
    parser.add_argument('--rename', action='append', default=[], metavar='OLD=NEW',
                        help='Replace the key prefix OLD by NEW; may be repeated.')
    parser.add_argument('--skip', action='append', default=[], metavar='PREFIX',
                        help='Drop keys starting with PREFIX; may be repeated.')
    return parser.parse_args(argv)


def _parse_renames(renames):
    pairs = []
    for item in renames:
        if '=' not in item:
            raise ValueError(f'rename {item!r} must look like OLD=NEW')
        old, new = item.split('=', 1)
        pairs.append((old, new))
    return pairs


def unwrap_state_dict(checkpoint):
    """Descend into the usual ``state_dict`` / ``model`` wrappers."""
    while isinstance(checkpoint, dict):
        inner = next((checkpoint[k] for k in STATE_DICT_KEYS if k in checkpoint), None)
        if inner is None:
            break
        checkpoint = inner
    return checkpoint


def convert_state_dict(state_dict, renames=(), skip=()):
    """Map tensors of ``state_dict`` onto a :class:`Weights` store."""
    weights = Weights()
    for key, value in OrderedDict(state_dict).items():
        if not torch.is_tensor(value) or any(key.startswith(p) for p in skip):
            continue
        name = key
        for old, new in renames:
            if name.startswith(old):
                name = new + name[len(old):]
                break
        weights[name] = value.detach().cpu().float().numpy()
    return weights


def main(argv=None):
    args = parse_arguments(argv)
    print(f'loading checkpoint file: {args.input_file}')
    checkpoint = torch.load(args.input_file, map_location='cpu')
    weights = convert_state_dict(unwrap_state_dict(checkpoint), _parse_renames(args.rename), args.skip)
    weights.save(args.output_folder)
    print(f'wrote {len(weights)} tensors to {args.output_folder}')


if __name__ == "__main__":
    main()
