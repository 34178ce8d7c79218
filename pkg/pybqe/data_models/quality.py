# -*- coding: utf-8 -*-
"""
Data models describing distortion levels: how QPs are grouped, and the probability vectors
over the low, medium and high levels.
"""

import attr
import numpy as np

from typing import Dict, Tuple
from pybqe.constants import DEFAULT_QP_GROUPS, DEFAULT_SIGMA, DISTORTION_LEVELS
from pybqe.data_models.utils import check_simplex, positive


def _groups_converter(groups: Dict) -> Dict[str, Tuple[int, ...]]:
    return {level: tuple(int(qp) for qp in qps) for level, qps in groups.items()}


def _groups_validator(instance, attribute, value) -> None:
    """
    Custom validator.

    :param instance: the `attrs` class instance
    :param attribute: the attribute
    :param value: the attribute value
    """

    if set(value.keys()) != set(DISTORTION_LEVELS):
        raise ValueError("QP groups have to be keyed by {levels} (got {keys}).".format(
            levels=list(DISTORTION_LEVELS),
            keys=sorted(value.keys())
        ))

    for level, qps in value.items():

        if len(qps) == 0:
            raise ValueError("The QP group of level `{}` is empty.".format(level))


@attr.s(frozen=True)
class DistortionGrouping(object):
    """
    The assignment of QPs to the low, medium and high distortion levels, together with the
    width of the Gaussian kernel used to soften level labels.
    """

    groups: Dict[str, Tuple[int, ...]] = attr.ib(
        converter=_groups_converter,
        validator=_groups_validator,
        default=DEFAULT_QP_GROUPS,
        hash=False
    )
    """
    The QPs of every distortion level.
    """

    sigma: float = attr.ib(
        validator=[attr.validators.instance_of(float), positive],
        converter=float,
        default=DEFAULT_SIGMA
    )
    """
    The standard deviation of the Gaussian kernel, in QP units.
    """

    def __attrs_post_init__(self) -> None:
        """
        A hook to check that the levels are ordered by QP.

        :raises: :any:`ValueError`
        """

        centers = self.centers

        if not centers[0] < centers[1] < centers[2]:
            raise ValueError("QP centres have to increase from low to high distortion (got {}).".format(
                centers
            ))

    @property
    def centers(self) -> Tuple[float, float, float]:
        """
        The mean QP of every level, ordered L, M, H.
        """

        return tuple(float(np.mean(self.groups[level])) for level in DISTORTION_LEVELS)

    @property
    def qps(self) -> Tuple[int, ...]:
        """
        All QPs, from the highest to the lowest.
        """

        return tuple(sorted((qp for qps in self.groups.values() for qp in qps), reverse=True))

    def level_of(self, qp: int) -> int:
        """
        The position (0 = L, 1 = M, 2 = H) of the group a QP belongs to.

        :param qp: the QP
        :return: the level position
        """

        for position, level in enumerate(DISTORTION_LEVELS):

            if qp in self.groups[level]:
                return position

        raise ValueError("QP {qp} is not in the configured set {qps}.".format(qp=qp, qps=list(self.qps)))


def _simplex_post_init(instance) -> None:
    check_simplex([instance.low, instance.medium, instance.high], type(instance).__name__)


@attr.s(frozen=True)
class QualityVector(object):
    """
    The estimated probabilities of a frame being lightly, moderately or heavily distorted.
    """

    low: float = attr.ib(converter=float)
    medium: float = attr.ib(converter=float)
    high: float = attr.ib(converter=float)

    def __attrs_post_init__(self) -> None:
        _simplex_post_init(self)

    def as_array(self) -> np.ndarray:
        return np.array([self.low, self.medium, self.high])

    @classmethod
    def from_array(cls, values) -> "QualityVector":
        low, medium, high = np.asarray(values, dtype=np.float64).reshape(3)
        return cls(low=low, medium=medium, high=high)


@attr.s(frozen=True)
class SoftLabel(object):
    """
    The Gaussian-kernel target distribution over distortion levels for one QP.
    """

    low: float = attr.ib(converter=float)
    medium: float = attr.ib(converter=float)
    high: float = attr.ib(converter=float)

    def __attrs_post_init__(self) -> None:
        _simplex_post_init(self)

        if min(self.low, self.medium, self.high) < 0:
            raise ValueError("Soft label components cannot be negative.")

    def as_array(self) -> np.ndarray:
        return np.array([self.low, self.medium, self.high])
