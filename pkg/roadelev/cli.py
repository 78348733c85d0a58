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

"""roadelev command-line entry point.

Exit codes: 0 success, 2 usage or configuration error, 3 runtime or data error.
"""

import json
import os
import sys

from roadelev import logging
from roadelev.arguments import parse_args
from roadelev.benchmark import bench_view_transform, write_report
from roadelev.config import load_config
from roadelev.data import SceneParams, flat_scene, gen_scene, load_scene, render_scene, save_scene
from roadelev.enums import PipelineMode, parse_enum
from roadelev.exceptions import ArgumentError, ConfigError, DataError, RoadElevError, StageError
from roadelev.global_vars import get_tensorboard_writer, get_timers, reset_global_variables
from roadelev.initialize import initialize_roadelev
from roadelev.model import load_weights, oracle_weights, run_mono, run_stereo
from roadelev.numerics import save_tensor, set_num_threads, write_pgm
from roadelev.supervision import SupervisionBatch, metrics

logger = logging.get_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RUNTIME = 3


def _setup(args, **overrides):
    config = load_config(args.config, overrides=dict(overrides, seed=args.seed))
    initialize_roadelev(config, log_level=args.log_level, threads=args.threads,
                        tensorboard_dir=args.tensorboard_dir)
    return config


def cmd_gen_scene(args):
    config = _setup(args, depth_noise=args.depth_noise, label_dropout=args.label_dropout)
    params = SceneParams.from_config(config, num_bumps=args.bumps, num_potholes=args.potholes,
                                     num_cracks=args.cracks, max_amplitude=args.amplitude, max_tilt=args.tilt)
    params.validate()
    spec = flat_scene(params, seed=config.seed) if args.flat else gen_scene(config.seed, params)
    scene = render_scene(config, spec, with_image=args.with_image)
    save_scene(args.out, scene, config)
    config.save(os.path.join(args.out, "config.json"))
    return EXIT_OK


def _load_pipeline_weights(args, config, mode):
    if args.oracle:
        return oracle_weights(config, mode)
    path = args.weights or (config.mono_weights if mode is PipelineMode.mono else config.stereo_weights)
    if path is None:
        raise ConfigError('no weights given: pass --weights or --oracle, or set {}_weights'.format(mode.name))
    return load_weights(path)


def cmd_run(args):
    config = _setup(args, view_transform=args.view_transform)
    mode = parse_enum(PipelineMode, args.mode)
    weights = _load_pipeline_weights(args, config, mode)
    scene = load_scene(args.scene, config)
    timers = get_timers()
    os.makedirs(args.out, exist_ok=True)

    report = {"mode": mode.name, "scene_seed": scene.spec.seed}
    if mode is PipelineMode.mono:
        out = run_mono(scene.inputs(0, args.use_image), weights, config, rig=scene.views[0].rig, timers=timers)
        elevation = out.elevation
        if not args.use_image:
            report["loss"] = SupervisionBatch.from_scene(scene, config).loss(out.E_prob, out.depth_probs)
    else:
        if len(scene.views) < 2:
            raise DataError('stereo needs two camera renders, scene {} has {}'.format(args.scene, len(scene.views)))
        out = run_stereo(scene.inputs(0, args.use_image), scene.inputs(1, args.use_image), weights, config,
                         rigs=(scene.views[0].rig, scene.views[1].rig), timers=timers)
        elevation = out.elevation
        save_tensor(os.path.join(args.out, "attention_spatial"), out.A_s)
        save_tensor(os.path.join(args.out, "attention_confidence"), out.A_c.values)

    save_tensor(os.path.join(args.out, "elevation"), elevation.values)
    save_tensor(os.path.join(args.out, "elevation_mask"), elevation.mask, dtype="u8")
    write_pgm(os.path.join(args.out, "elevation.pgm"), elevation.values, elevation.mask,
              value_range=(-config.e_bound, config.e_bound))
    report.update(metrics(elevation, scene.gt))
    with open(os.path.join(args.out, "metrics.json"), "w") as f:
        json.dump(report, f, indent=2, sort_keys=True)
        f.write("\n")

    writer = get_tensorboard_writer()
    if writer is not None:
        timers.write(timers.names(), writer, 0)
    timers.log()
    logger.info(f"{mode.name}: abs err {report['abs_err_cm']} cm over {report['n_cells']} cells")
    return EXIT_OK


def cmd_bench_vt(args):
    config = _setup(args)
    report = bench_view_transform(config, repetitions=args.repetitions, warmup=args.warmup, stride=args.stride,
                                  lut_dir=args.lut_dir, writer=get_tensorboard_writer())
    if args.out:
        write_report(args.out, report)
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


COMMANDS = {
    'gen-scene': cmd_gen_scene,
    'run': cmd_run,
    'bench-vt': cmd_bench_vt,
}


def exit_code(exc):
    """Configuration problems and invalid parameters are usage errors; failures inside stages are runtime errors."""
    if isinstance(exc, StageError):
        return EXIT_RUNTIME
    if isinstance(exc, (ConfigError, ArgumentError)):
        return EXIT_USAGE
    return EXIT_RUNTIME


def main(argv=None):
    try:
        args = parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    try:
        return COMMANDS[args.command](args)
    except RoadElevError as e:
        logger.debug("command failed", exc_info=True)
        print('roadelev {}: error: {}'.format(args.command, e), file=sys.stderr)
        return exit_code(e)
    finally:
        reset_global_variables()
        set_num_threads(None)


if __name__ == "__main__":
    sys.exit(main())
