# -*- coding: utf-8 -*-
"""
Data models for nearest neighbour search results and patch partitions.
"""

import attr
import numpy as np

from typing import Tuple
from pybqe.data_models.utils import frozen_array, array_eq, non_negative


@attr.s(frozen=True, hash=False)
class NeighborIndex(object):
    """
    The k nearest support points of every query point, with their Euclidean distances.
    """

    indices: np.ndarray = attr.ib(
        converter=frozen_array(np.int64, 2),
        eq=array_eq()
    )
    """
    The m x k positions in the support set, nearest first.
    """

    distances: np.ndarray = attr.ib(
        converter=frozen_array(np.float64, 2),
        validator=non_negative,
        eq=array_eq()
    )
    """
    The m x k distances in voxel units, non-decreasing along every row.
    """

    def __attrs_post_init__(self) -> None:
        """
        A hook to check the shapes and the ordering of the distances.

        :raises: :any:`ValueError`
        """

        if self.indices.shape != self.distances.shape:
            raise ValueError("Index shape {index} differs from distance shape {dist}.".format(
                index=self.indices.shape,
                dist=self.distances.shape
            ))

        elif np.any(np.diff(self.distances, axis=1) < 0):
            raise ValueError("Neighbour distances have to be non-decreasing along every row.")

    @property
    def k(self) -> int:
        return self.indices.shape[1]

    def restrict(self, k: int) -> "NeighborIndex":
        """
        Keeps only the first `k` neighbours of every row.

        :param k: the number of neighbours to keep
        :return: the narrower index
        """

        if k > self.k:
            raise ValueError("Cannot restrict {have} neighbours to {want}.".format(have=self.k, want=k))

        return NeighborIndex(indices=self.indices[:, :k], distances=self.distances[:, :k])


def _patches_validator(instance, attribute, value) -> None:
    """
    Custom validator.

    :param instance: the `attrs` class instance
    :param attribute: the attribute
    :param value: the attribute value
    """

    for patch in value:

        if patch.ndim != 1 or patch.size == 0:
            raise ValueError("Every patch has to be a non-empty list of point indices.")


@attr.s(frozen=True, hash=False)
class PatchSet(object):
    """
    Overlapping point subsets covering a whole frame.
    """

    patches: Tuple[np.ndarray, ...] = attr.ib(
        converter=lambda patches: tuple(frozen_array(np.int64, 1)(patch) for patch in patches),
        validator=_patches_validator,
        eq=attr.cmp_using(eq=lambda a, b: len(a) == len(b) and all(map(np.array_equal, a, b)))
    )
    """
    The point indices of every patch.
    """

    origin_n: int = attr.ib(
        validator=attr.validators.instance_of(int),
        converter=int
    )
    """
    The number of points in the source frame.
    """

    max_patch_size: int = attr.ib(
        validator=attr.validators.instance_of(int),
        converter=int
    )
    """
    The configured maximum patch size.
    """

    def __attrs_post_init__(self) -> None:
        """
        A hook to check full coverage and the patch size limit.

        :raises: :any:`ValueError`
        """

        covered = np.zeros(self.origin_n, dtype=bool)

        for patch in self.patches:

            if patch.min() < 0 or patch.max() >= self.origin_n:
                raise ValueError("Patch indices have to lie in [0, {}).".format(self.origin_n))

            elif patch.size > self.max_patch_size:
                raise ValueError("A patch holds {size} points, more than the maximum {limit}.".format(
                    size=patch.size,
                    limit=self.max_patch_size
                ))

            covered[patch] = True

        if not covered.all():
            raise ValueError("{} points are not covered by any patch.".format(int((~covered).sum())))

    def __len__(self) -> int:
        return len(self.patches)
