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

"""Ray-cast depth, procedural features and oracle depth distributions for synthetic scenes."""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from roadelev import logging
from roadelev.exceptions import ArgumentError
from roadelev.geometry import pixel_rays
from roadelev.geometry.camera import MIN_DEPTH
from roadelev.numerics import parallel_for

logger = logging.get_logger(__name__)

MARCH_STEP = 0.02
DEPTH_TOLERANCE = 1e-4
RAY_GRAIN = 1024

# P(X > x) for a standard normal X
_upper_tail = np.vectorize(lambda x: 0.5 * math.erfc(x / math.sqrt(2.0)), otypes=[np.float64])

# direction towards the light, world frame
LIGHT_DIRECTION = np.array([0.3, -0.4, 1.0]) / np.linalg.norm([0.3, -0.4, 1.0])

# texture channel c uses TEXTURE_FREQUENCIES[(c - 1) % len] rad/m along world x and y plus a phase
TEXTURE_FREQUENCIES = (
    (2.1, 0.7, 0.0),
    (0.9, 2.6, 1.3),
    (3.3, -1.1, 2.2),
    (-1.7, 3.0, 0.4),
    (4.1, 1.9, 2.9),
    (1.3, -3.7, 0.8),
    (-2.9, -2.3, 1.7),
)


@dataclass
class DepthRender:
    """Camera-frame depth per pixel with a hit mask, plus the world hit points."""

    depth: np.ndarray
    mask: np.ndarray
    points: Optional[np.ndarray] = None

    @property
    def shape(self):
        return self.depth.shape


def pixel_grid(K, stride=1):
    """Pixel-center coordinates (u, v) of the feature map at ``stride``: feature pixel j sits at (j + 0.5) * stride."""
    h, w = K.height // stride, K.width // stride
    u = (np.arange(w, dtype=np.float64) + 0.5) * stride
    v = (np.arange(h, dtype=np.float64) + 0.5) * stride
    return np.meshgrid(u, v)


def _extent_exit(scene, origin, d):
    """Ray parameter at which each ray leaves the scene extent in x or y."""
    exits = []
    for axis, (lo, hi) in enumerate((scene.x_extent, scene.y_extent)):
        da = d[:, axis]
        safe = np.where(da != 0, da, 1.0)
        far = np.maximum((lo - origin[axis]) / safe, (hi - origin[axis]) / safe)
        exits.append(np.where(da != 0, far, np.inf))
    return np.minimum(*exits)


def cast_rays(scene, origin, directions):
    """First surface hit along ``origin + t * directions`` for (n, 3) directions; returns (t, hit).

    Each ray is marched in 0.02 m steps over the slab where the surface can lie, then refined by bisection to 1e-4.
    """
    directions = np.asarray(directions, dtype=np.float64).reshape(-1, 3)
    n = directions.shape[0]
    t_hit = np.full(n, np.nan)
    hit = np.zeros(n, dtype=bool)
    bound = scene.elevation_bound() + 1e-6
    oz = origin[2]
    if oz <= bound:
        logger.warning("camera at height {:.3f} m lies within the surface slab".format(oz))

    def height_above(t, d):
        p = origin + t[:, None] * d
        return p[:, 2] - scene.elevation(p[:, 0], p[:, 1])

    def _run(start, stop):
        d = directions[start:stop]
        down = d[:, 2] < 0
        dz = np.where(down, d[:, 2], -1.0)
        t_lo = np.maximum((oz - bound) / -dz, 0.0)
        t_hi = np.minimum((oz + bound) / -dz, _extent_exit(scene, origin, d))
        down &= t_hi > t_lo
        t_lo = np.where(down, t_lo, 0.0)
        t_hi = np.where(down, t_hi, 0.0)
        step = MARCH_STEP / np.maximum(np.linalg.norm(d, axis=1), 1e-12)
        lo = t_lo.copy()
        active = down & (height_above(np.where(down, lo, 0.0), d) > 0)
        found = np.zeros(stop - start, dtype=bool)
        hi = lo.copy()
        while np.any(active):
            nxt = np.minimum(lo + step, t_hi)
            below = height_above(np.where(active, nxt, 0.0), d) <= 0
            newly = active & below
            found |= newly
            hi = np.where(newly, nxt, hi)
            exhausted = active & ~below & (nxt >= t_hi)
            lo = np.where(active & ~below, nxt, lo)
            active &= ~(newly | exhausted)
        iterations = int(math.ceil(math.log2(MARCH_STEP / DEPTH_TOLERANCE))) + 1
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            above = height_above(np.where(found, mid, 0.0), d) > 0
            lo = np.where(found & above, mid, lo)
            hi = np.where(found & ~above, mid, hi)
        t = 0.5 * (lo + hi)
        p = origin + t[:, None] * d
        inside = found & scene.contains(p[:, 0], p[:, 1])
        t_hit[start:stop] = np.where(inside, t, np.nan)
        hit[start:stop] = inside

    parallel_for(n, _run, grain=RAY_GRAIN)
    return t_hit, hit


def render_depth(scene, rig, stride=1):
    """Depth at the pixel centers of the stride-``stride`` feature map; misses are masked with depth 0."""
    K, T = rig.intrinsics, rig.extrinsics
    u, v = pixel_grid(K, stride)
    dirs = pixel_rays(K, T, u, v)
    t, hit = cast_rays(scene, T.camera_center, dirs.reshape(-1, 3))
    depth = np.where(hit, t, 0.0).reshape(u.shape)
    points = T.camera_center + np.where(hit, t, 0.0)[:, None] * dirs.reshape(-1, 3)
    mask = hit.reshape(u.shape)
    if not mask.any():
        logger.warning(f"no pixel of the stride-{stride} map hits the scene")
    return DepthRender(depth=depth, mask=mask, points=points.reshape(u.shape + (3,)))


def shading(scene, points):
    """max(0, n . l) at world ``points`` (..., 3)."""
    n = scene.normals(points[..., 0], points[..., 1])
    return np.maximum(n @ LIGHT_DIRECTION, 0.0)


def texture(points, channel):
    fx, fy, phase = TEXTURE_FREQUENCIES[(channel - 1) % len(TEXTURE_FREQUENCIES)]
    return 0.5 + 0.5 * np.sin(fx * points[..., 0] + fy * points[..., 1] + phase + 0.37 * (channel - 1))


def render_features(scene, render, num_channels, seed, noise=0.0):
    """(h, w, C) features: shading in channel 0, world-anchored textures after it, seeded noise on hit pixels."""
    h, w = render.shape
    feat = np.zeros((h, w, num_channels), dtype=np.float64)
    pts = render.points
    feat[..., 0] = shading(scene, pts)
    for c in range(1, num_channels):
        feat[..., c] = texture(pts, c)
    if noise > 0:
        rng = np.random.default_rng(seed)
        feat += rng.normal(0.0, noise, size=feat.shape)
    feat[~render.mask] = 0.0
    return feat.astype(np.float32)


def render_image(scene, rig, seed, noise=0.0):
    """(H, W, 3) image from the same shading and texture model, for the image-input path."""
    return render_features(scene, render_depth(scene, rig, 1), 3, seed, noise)


def oracle_depth_distributions(render, dspec, sigma_inverse, noise=0.0, seed=0):
    """Depth-bin distributions of a Gaussian in inverse depth around the (optionally noisy) rendered depth.

    Bin k receives the Gaussian mass between the inverse depths of its edges. Mass nearer than ``d_min`` goes to
    the first bin and mass beyond ``d_max`` to the last, so every hit pixel sums to one. Misses are uniform.

    Args:
        render: :class:`DepthRender` of one feature map.
        dspec: depth bins.
        sigma_inverse: standard deviation in 1/m.
        noise: standard deviation of the additive depth noise in meters.
        seed: seed of the depth noise.
    """
    if not sigma_inverse > 0:
        raise ArgumentError('sigma_inverse must be positive, got {}'.format(sigma_inverse))
    depth = render.depth
    if noise > 0:
        depth = depth + np.random.default_rng(seed).normal(0.0, noise, size=depth.shape)
    inverse = np.where(render.mask, 1.0 / np.maximum(depth, MIN_DEPTH), 0.0)
    # cumulative mass nearer than each edge; edges run from d_min to d_max
    cdf = _upper_tail((1.0 / dspec.edges - inverse[..., None]) / sigma_inverse)
    cdf[..., 0] = 0.0
    cdf[..., -1] = 1.0
    probs = np.diff(cdf, axis=-1)
    probs[~render.mask] = 1.0 / dspec.C_d
    return probs.astype(np.float32)


def one_hot_depth(render, dspec):
    """One-hot ground-truth distributions at the nearest depth bin; misses are uniform."""
    idx = dspec.nearest_bin(np.where(render.mask, render.depth, dspec.d_min))
    probs = np.zeros(render.shape + (dspec.C_d,), dtype=np.float32)
    np.put_along_axis(probs, idx[..., None], 1.0, axis=-1)
    probs[~render.mask] = 1.0 / dspec.C_d
    return probs

