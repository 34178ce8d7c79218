# -*- coding: utf-8 -*-
"""
Patch generation and fusion: a large frame is cut into overlapping point subsets that are
processed independently, and the per-patch outputs are averaged back onto the frame.
"""

import math
import numpy as np

from typing import Iterable, Tuple
from pybqe.data_models.frame import PointCloudFrame
from pybqe.data_models.neighborhood import PatchSet
from pybqe.point_cloud.neighborhood import knn
from pybqe.constants import DEFAULT_PATCH_SIZE, DEFAULT_STRIDE_FRACTION


def generate_patches(
        frame: PointCloudFrame,
        patch_size: int = DEFAULT_PATCH_SIZE,
        stride_fraction: float = DEFAULT_STRIDE_FRACTION
) -> PatchSet:
    """
    Seeds patches by farthest point sampling; every patch holds the `patch_size` points
    nearest to its seed. At least ceil(n / (patch_size * stride_fraction)) seeds are drawn,
    and sampling then continues among uncovered points until every point is covered.
    A frame no larger than `patch_size` becomes a single patch.

    :param frame: the frame to cut
    :param patch_size: the number of points per patch
    :param stride_fraction: the seed spacing relative to the patch size, in (0, 1]
    :return: the patch set
    :raises: :any:`ValueError` for a non-positive patch size or a stride outside (0, 1]
    """

    if patch_size < 1:
        raise ValueError("The patch size has to be positive (got {}).".format(patch_size))

    elif not 0 < stride_fraction <= 1:
        raise ValueError("The stride fraction has to lie in (0, 1] (got {}).".format(stride_fraction))

    n = frame.n_points

    if n <= patch_size:
        return PatchSet(patches=[np.arange(n)], origin_n=n, max_patch_size=patch_size)

    geometry = frame.geometry.astype(np.float64)
    quota = int(math.ceil(n / (patch_size * stride_fraction)))
    covered = np.zeros(n, dtype=bool)
    nearest_seed = np.full(n, np.inf)
    patches = []
    seed = 0

    while len(patches) < quota or not covered.all():
        patch = knn(geometry[seed], geometry, patch_size).indices[0]
        patches.append(np.sort(patch))
        covered[patch] = True
        nearest_seed = np.minimum(nearest_seed, ((geometry - geometry[seed]) ** 2).sum(axis=1))

        if len(patches) < quota:
            seed = int(np.argmax(nearest_seed))

        elif not covered.all():
            seed = int(np.argmax(np.where(covered, -1., nearest_seed)))

    return PatchSet(patches=patches, origin_n=n, max_patch_size=patch_size)


def fuse_patches(patch_outputs: Iterable[Tuple[np.ndarray, np.ndarray]], origin_n: int) -> np.ndarray:
    """
    Averages per-patch values back onto the frame: every point receives the mean of the
    values of all patches containing it.

    :param patch_outputs: (point indices, values) pairs; value rows follow the indices
    :param origin_n: the number of points in the frame
    :return: the origin_n x c fused values
    :raises: :any:`ValueError` if a point is covered by no patch or shapes disagree
    """

    totals = None
    counts = np.zeros(origin_n, dtype=np.int64)

    for indices, values in patch_outputs:
        indices = np.asarray(indices, dtype=np.int64)
        values = np.asarray(values, dtype=np.float64)
        values = values.reshape(values.shape[0], -1)

        if values.shape[0] != indices.shape[0]:
            raise ValueError("A patch has {idx} indices but {rows} value rows.".format(
                idx=indices.shape[0],
                rows=values.shape[0]
            ))

        if totals is None:
            totals = np.zeros((origin_n, values.shape[1]))

        np.add.at(totals, indices, values)
        np.add.at(counts, indices, 1)

    uncovered = np.flatnonzero(counts == 0)

    if totals is None or uncovered.size > 0:
        raise ValueError("{} points are not covered by any patch.".format(
            origin_n if totals is None else uncovered.size
        ))

    return totals / counts[:, None]
