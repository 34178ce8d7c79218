# -*- coding: utf-8 -*-
"""
Bjontegaard metrics between two rate-distortion curves. Both fit a cubic polynomial per curve
and integrate the difference of the fits in closed form over the overlap of the curves.
"""

import logging
import numpy as np

from typing import Tuple
from pybqe.data_models.curves import RDCurve
from pybqe.constants import BD_MIN_POINTS

logger = logging.getLogger(__name__)


def _finite_points(curve: RDCurve, name: str) -> Tuple[np.ndarray, np.ndarray]:
    """
    The rates and PSNRs of a curve without infinite-PSNR points.

    :raises: :any:`ValueError` if fewer than four points remain
    """

    rates, psnrs = curve.rates, curve.psnrs
    finite = np.isfinite(psnrs)

    if not finite.all():
        logger.warning("Dropping %d infinite-PSNR point(s) from the %s curve.", int((~finite).sum()), name)
        rates, psnrs = rates[finite], psnrs[finite]

    if rates.shape[0] < BD_MIN_POINTS:
        raise ValueError("The {name} curve has {n} usable points; the cubic fit needs {want}.".format(
            name=name,
            n=rates.shape[0],
            want=BD_MIN_POINTS
        ))

    return rates, psnrs


def _mean_difference(x_anchor, y_anchor, x_test, y_test) -> float:
    """
    The mean of fit(test) - fit(anchor) over the overlap of the x ranges, with cubic fits of y
    over x.

    :raises: :any:`ValueError` if the x ranges do not overlap
    """

    low = max(x_anchor.min(), x_test.min())
    high = min(x_anchor.max(), x_test.max())

    if not high > low:
        raise ValueError("The curves do not overlap (interval [{low}, {high}]).".format(low=low, high=high))

    anchor_integral = np.polyint(np.polyfit(x_anchor, y_anchor, 3))
    test_integral = np.polyint(np.polyfit(x_test, y_test, 3))
    anchor_area = np.polyval(anchor_integral, high) - np.polyval(anchor_integral, low)
    test_area = np.polyval(test_integral, high) - np.polyval(test_integral, low)
    return (test_area - anchor_area) / (high - low)


def bd_rate(anchor: RDCurve, test: RDCurve) -> float:
    """
    The average rate change of the test curve at equal PSNR, in percent. Negative values mean
    the test needs fewer bits.

    :param anchor: the reference curve
    :param test: the curve under evaluation
    :return: the BD-rate in percent
    :raises: :any:`ValueError` for fewer than four finite points or no PSNR overlap
    """

    anchor_rates, anchor_psnrs = _finite_points(anchor, "anchor")
    test_rates, test_psnrs = _finite_points(test, "test")
    mean_log_difference = _mean_difference(anchor_psnrs, np.log10(anchor_rates), test_psnrs, np.log10(test_rates))
    return (10. ** mean_log_difference - 1.) * 100.


def bd_psnr(anchor: RDCurve, test: RDCurve) -> float:
    """
    The average PSNR change of the test curve at equal rate, in dB.

    :param anchor: the reference curve
    :param test: the curve under evaluation
    :return: the BD-PSNR in dB
    :raises: :any:`ValueError` for fewer than four finite points or no rate overlap
    """

    anchor_rates, anchor_psnrs = _finite_points(anchor, "anchor")
    test_rates, test_psnrs = _finite_points(test, "test")
    return _mean_difference(np.log10(anchor_rates), anchor_psnrs, np.log10(test_rates), test_psnrs)
