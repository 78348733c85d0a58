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

"""roadelev command-line arguments."""

import argparse

from roadelev.enums import PipelineMode, ViewTransformType
from roadelev.logging import log_levels
from roadelev.package_info import __description__, __version__


def parse_args(argv=None):
    """Parse all arguments; argparse exits with status 2 on usage errors."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.error('a command is required')
    return args


def build_parser():
    parser = argparse.ArgumentParser(prog='roadelev', description=__description__, allow_abbrev=False)
    parser.add_argument('--version', action='version', version='%(prog)s {}'.format(__version__))
    parser = _add_runtime_args(parser)

    subparsers = parser.add_subparsers(dest='command', metavar='command')

    gen = subparsers.add_parser('gen-scene', help='Generate and render a synthetic road scene.', allow_abbrev=False)
    gen = _add_config_args(gen)
    gen = _add_scene_args(gen)

    run = subparsers.add_parser('run', help='Run the mono or stereo pipeline on a scene.', allow_abbrev=False)
    run = _add_config_args(run)
    run = _add_pipeline_args(run)

    bench = subparsers.add_parser('bench-vt', help='Benchmark LUT gather against the reference sampler.',
                                  allow_abbrev=False)
    bench = _add_config_args(bench, default_profile='paper')
    bench = _add_bench_args(bench)
    return parser


def _add_runtime_args(parser):
    group = parser.add_argument_group(title='runtime')

    group.add_argument('--threads', type=_positive_int, default=None,
                       help='Cap on worker threads used by the kernels.')
    group.add_argument('--log-level', type=str, default=None, choices=log_levels.keys(),
                       help='Logger log level to use. Choices are {}.'.format(list(log_levels.keys())))
    group.add_argument('--tensorboard-dir', type=str, default=None,
                       help='Write timers and benchmark scalars to this tensorboard directory.')
    return parser


def _add_config_args(parser, default_profile='desk'):
    group = parser.add_argument_group(title='configuration')

    group.add_argument('--config', type=str, default=default_profile,
                       help='Profile name (paper, desk) or path to a JSON configuration file.')
    group.add_argument('--seed', type=int, default=None,
                       help='Random seed; overrides the configuration.')
    return parser


def _add_scene_args(parser):
    group = parser.add_argument_group(title='scene')

    group.add_argument('--out', type=str, required=True,
                       help='Output scene directory.')
    group.add_argument('--bumps', type=int, default=3,
                       help='Number of bumps.')
    group.add_argument('--potholes', type=int, default=0,
                       help='Number of potholes.')
    group.add_argument('--cracks', type=int, default=0,
                       help='Number of cracks.')
    group.add_argument('--amplitude', type=float, default=None,
                       help='Maximum primitive amplitude in meters (at most e_bound).')
    group.add_argument('--tilt', type=float, default=None,
                       help='Maximum base-plane tilt in radians.')
    group.add_argument('--depth-noise', type=float, default=None,
                       help='Std of the per-pixel depth noise of the oracle distributions, meters.')
    group.add_argument('--label-dropout', type=float, default=None,
                       help='Share of ground-truth cells hidden from the elevation mask.')
    group.add_argument('--flat', action='store_true',
                       help='Generate a flat z = 0 scene, ignoring primitive counts.')
    group.add_argument('--with-image', action='store_true',
                       help='Also render full-resolution images for the image-input path.')
    return parser


def _add_pipeline_args(parser):
    group = parser.add_argument_group(title='pipeline')

    group.add_argument('--mode', type=str, default=PipelineMode.mono.name, choices=[m.name for m in PipelineMode],
                       help='Pipeline to run.')
    group.add_argument('--scene', type=str, required=True,
                       help='Scene directory written by gen-scene.')
    group.add_argument('--weights', type=str, default=None,
                       help='Weights directory; defaults to the mono_weights / stereo_weights config entry.')
    group.add_argument('--oracle', action='store_true',
                       help='Use constructive oracle weights instead of a weights directory.')
    group.add_argument('--use-image', action='store_true',
                       help='Feed the rendered image through the heads instead of injecting oracle inputs.')
    group.add_argument('--view-transform', type=str, default=None, choices=[v.name for v in ViewTransformType],
                       help='View transformation implementation.')
    group.add_argument('--out', type=str, required=True,
                       help='Output directory for the elevation map and metrics.')
    return parser


def _add_bench_args(parser):
    group = parser.add_argument_group(title='benchmark')

    group.add_argument('--repetitions', type=_positive_int, default=None,
                       help='Timed repetitions per implementation.')
    group.add_argument('--warmup', type=int, default=None,
                       help='Untimed warmup runs per implementation.')
    group.add_argument('--stride', type=int, default=None,
                       help='Feature stride to benchmark; defaults to the finest.')
    group.add_argument('--lut-dir', type=str, default=None,
                       help='Dump the projection LUT to this directory.')
    group.add_argument('--out', type=str, default=None,
                       help='Write the JSON report here as well as to stdout.')
    return parser


def _positive_int(value):
    value = int(value)
    if value < 1:
        raise argparse.ArgumentTypeError('expected a positive integer, got {}'.format(value))
    return value
