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

"""View-transformation benchmark: LUT gather against the on-the-fly reference sampler."""

import json
import time

import numpy as np

from roadelev import logging
from roadelev.numerics import get_num_threads
from roadelev.view_transform import build_lut, gather_voxels, sample_voxels_reference, save_lut

logger = logging.get_logger(__name__)

REPORT_KEYS = (
    "build_lut_ms", "gather", "reference", "speedup", "max_abs_diff", "grid", "stride", "repetitions", "warmup",
    "threads",
)


def _time_ms(fn, repetitions, warmup):
    for _ in range(warmup):
        fn()
    times = []
    for _ in range(repetitions):
        started = time.perf_counter()
        fn()
        times.append((time.perf_counter() - started) * 1000.0)
    return times


def _summary(times):
    return {
        "median_ms": float(np.median(times)),
        "p95_ms": float(np.percentile(times, 95)),
        "min_ms": float(np.min(times)),
    }


def random_view_inputs(feat_dims, num_channels, dspec, seed):
    """Seeded features and normalized depth distributions of the given feature-map size."""
    rng = np.random.default_rng(seed)
    F_img = rng.standard_normal((feat_dims.h, feat_dims.w, num_channels)).astype(np.float32)
    logits = rng.standard_normal((feat_dims.h, feat_dims.w, dspec.C_d))
    D_pre = np.exp(logits - logits.max(axis=-1, keepdims=True))
    D_pre /= D_pre.sum(axis=-1, keepdims=True)
    return F_img, D_pre.astype(np.float32)


def bench_view_transform(config, repetitions=None, warmup=None, stride=None, lut_dir=None, writer=None):
    """Time ``build_lut`` once, then ``gather_voxels`` and ``sample_voxels_reference`` over ``repetitions`` runs.

    Returns the JSON-ready report; ``lut_dir`` dumps the LUT and ``writer`` receives the medians as scalars.
    """
    repetitions = config.bench_repetitions if repetitions is None else repetitions
    warmup = config.bench_warmup if warmup is None else warmup
    stride = min(config.strides) if stride is None else stride
    grid = config.make_grid()
    rig = config.rigs()[0]
    dims = config.feature_dims(stride)
    dspec = config.depth_spec()
    F_img, D_pre = random_view_inputs(dims, config.feature_channels, dspec, config.seed)

    started = time.perf_counter()
    lut = build_lut(grid, rig.intrinsics, rig.extrinsics, dims, dspec)
    build_ms = (time.perf_counter() - started) * 1000.0
    if lut_dir:
        save_lut(lut_dir, lut)

    def run_gather():
        return gather_voxels(lut, F_img, D_pre)

    def run_reference():
        return sample_voxels_reference(grid, rig.intrinsics, rig.extrinsics, dims, dspec, F_img, D_pre)

    diff = float(np.abs(run_gather().astype(np.float64) - run_reference()).max(initial=0.0))
    gather = _summary(_time_ms(run_gather, repetitions, warmup))
    reference = _summary(_time_ms(run_reference, repetitions, warmup))
    report = {
        "build_lut_ms": build_ms,
        "gather": gather,
        "reference": reference,
        "speedup": reference["median_ms"] / max(gather["median_ms"], 1e-9),
        "max_abs_diff": diff,
        "grid": list(grid.shape),
        "stride": int(stride),
        "valid_voxels": int(lut.num_valid),
        "repetitions": int(repetitions),
        "warmup": int(warmup),
        "threads": get_num_threads(),
    }
    logger.info(f"view transform: gather {gather['median_ms']:.3f} ms, reference {reference['median_ms']:.3f} ms, "
                f"max |diff| {diff:.3g}")
    if writer is not None:
        writer.add_scalar('bench/build_lut_ms', build_ms, 0)
        writer.add_scalar('bench/gather_median_ms', gather['median_ms'], 0)
        writer.add_scalar('bench/reference_median_ms', reference['median_ms'], 0)
        writer.add_scalar('bench/max_abs_diff', diff, 0)
    return report


def write_report(path, report):
    with open(path, "w") as f:
        json.dump(report, f, indent=2, sort_keys=True)
        f.write("\n")
