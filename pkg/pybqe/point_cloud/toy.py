# -*- coding: utf-8 -*-
"""
A synthetic dynamic point cloud: a textured spherical blob drifting across the voxel grid.
Every frame samples a different subset of the blob surface, so consecutive frames do not share
geometry, while the texture stays attached to the blob.
"""

import math
import numpy as np

from typing import List, Sequence
from pybqe.data_models.frame import PointCloudFrame
from pybqe.constants import ATTRIBUTE_PEAK


def _surface_voxels(radius: int) -> np.ndarray:
    """
    All voxels whose centre lies within half a voxel of a sphere surface.

    :param radius: the sphere radius in voxels
    :return: the m x 3 voxel offsets from the sphere centre
    """

    axis = np.arange(-radius - 1, radius + 2)
    grid = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 3)
    norm = np.sqrt((grid ** 2).sum(axis=1))
    return grid[np.abs(norm - radius) < 0.5]


def _texture(local: np.ndarray, radius: int) -> np.ndarray:
    """
    A smooth RGB texture defined on blob coordinates. Every channel completes less than half
    a period across the blob, so the colour changes by a few levels per voxel.

    :param local: the m x 3 offsets from the blob centre
    :param radius: the blob radius
    :return: the m x 3 integer RGB values
    """

    u = local / float(radius)
    rgb = np.stack([
        128. + 80. * np.sin(1.2 * u[:, 0] + 0.8 * u[:, 2]),
        128. + 80. * np.sin(1.1 * u[:, 1] - 0.6 * u[:, 0] + 0.4),
        128. + 80. * np.cos(0.9 * u[:, 2] + 0.7 * u[:, 1])
    ], axis=1)
    return np.clip(np.rint(rgb), 0., ATTRIBUTE_PEAK)


def make_toy_sequence(
        n_frames: int = 5,
        n_points: int = 512,
        seed: int = 0,
        velocity: Sequence[int] = (2, 1, 0)
) -> List[PointCloudFrame]:
    """
    Generates the synthetic sequence.

    :param n_frames: the number of frames
    :param n_points: the number of points in every frame
    :param seed: the seed of the per-frame surface sampling
    :param velocity: the integer voxel displacement of the blob between frames
    :return: the RGB frames, with integer attributes
    :raises: :any:`ValueError` for non-positive sizes
    """

    if n_frames < 1 or n_points < 1:
        raise ValueError("Frame and point counts have to be positive (got {f}, {p}).".format(f=n_frames, p=n_points))

    radius = int(math.ceil(math.sqrt(n_points / math.pi))) + 2
    surface = _surface_voxels(radius)
    texture = _texture(surface, radius)
    rng = np.random.default_rng(seed)
    origin = np.full(3, radius + 2)
    velocity = np.asarray(velocity, dtype=np.int64)
    frames = []

    for t in range(n_frames):
        chosen = np.sort(rng.choice(surface.shape[0], size=n_points, replace=False))
        frames.append(
            PointCloudFrame(
                geometry=surface[chosen] + origin + t * velocity,
                attributes=texture[chosen],
                frame_index=t
            )
        )

    return frames
