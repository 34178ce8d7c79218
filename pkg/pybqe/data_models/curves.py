# -*- coding: utf-8 -*-
"""
Rate-distortion curves as used by the Bjontegaard metrics.
"""

import attr
import numpy as np

from typing import Tuple


def _points_converter(points) -> Tuple[Tuple[float, float], ...]:
    return tuple((float(rate), float(psnr)) for rate, psnr in points)


def _points_validator(instance, attribute, value) -> None:
    """
    Custom validator.

    :param instance: the `attrs` class instance
    :param attribute: the attribute
    :param value: the attribute value
    """

    rates = [rate for rate, _ in value]

    if len(value) == 0:
        raise ValueError("A rate-distortion curve needs at least one point.")

    elif min(rates) <= 0:
        raise ValueError("Rates (bits per input point) have to be positive (got {}).".format(rates))

    elif any(later <= earlier for earlier, later in zip(rates, rates[1:])):
        raise ValueError("Rates have to be strictly increasing (got {}).".format(rates))


@attr.s(frozen=True)
class RDCurve(object):
    """
    Rate points (bits per input point) with their PSNR, sorted by rate.
    """

    points: Tuple[Tuple[float, float], ...] = attr.ib(
        converter=_points_converter,
        validator=_points_validator
    )
    """
    The (bpip, PSNR in dB) pairs.
    """

    @property
    def rates(self) -> np.ndarray:
        return np.array([rate for rate, _ in self.points])

    @property
    def psnrs(self) -> np.ndarray:
        return np.array([psnr for _, psnr in self.points])

    def __len__(self) -> int:
        return len(self.points)

    def scale_rate(self, factor: float) -> "RDCurve":
        """
        The same curve with every rate multiplied by a factor.

        :param factor: the positive rate multiplier
        :return: the scaled curve
        """

        return RDCurve(points=[(rate * factor, psnr) for rate, psnr in self.points])

    def with_psnrs(self, psnrs) -> "RDCurve":
        """
        The same rates paired with new PSNR values, e.g. after enhancement.

        :param psnrs: one PSNR per rate point
        :return: the new curve
        """

        psnrs = list(psnrs)

        if len(psnrs) != len(self.points):
            raise ValueError("Expected {want} PSNR values, got {got}.".format(want=len(self.points), got=len(psnrs)))

        return RDCurve(points=[(rate, psnr) for (rate, _), psnr in zip(self.points, psnrs)])
