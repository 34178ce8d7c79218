# -*- coding: utf-8 -*-
"""
Attribute fidelity: PSNR, its gain after enhancement and the 6:1:1 colour aggregate.
"""

import math
import numpy as np

from typing import Sequence
from pybqe.constants import ATTRIBUTE_PEAK, PSNR_INFINITY, YCBCR_PSNR_WEIGHTS


def _pair(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)

    if a.shape != b.shape:
        raise ValueError("Signals of shapes {a} and {b} cannot be compared.".format(a=a.shape, b=b.shape))

    elif a.size == 0:
        raise ValueError("PSNR needs at least one value.")

    return a, b


def psnr(a, b, peak: float = ATTRIBUTE_PEAK) -> float:
    """
    10 log10(peak^2 / MSE) between two signals.

    :param a: the first signal
    :param b: the second signal, of the same shape
    :param peak: the peak signal value
    :return: the PSNR in dB; :any:`PSNR_INFINITY` for identical signals
    :raises: :any:`ValueError` for differing shapes or empty signals
    """

    a, b = _pair(a, b)
    mse = float(np.mean((a - b) ** 2))

    if mse == 0:
        return PSNR_INFINITY

    return 10. * math.log10(peak ** 2 / mse)


def delta_psnr(enhanced, decoded, original, peak: float = ATTRIBUTE_PEAK) -> float:
    """
    The PSNR gain of the enhanced signal over the decoded one, both against the original.
    Equal PSNRs, infinite ones included, give a zero gain.

    :param enhanced: the enhanced signal
    :param decoded: the decoded signal
    :param original: the original signal
    :param peak: the peak signal value
    :return: the gain in dB
    """

    _pair(enhanced, original)
    _pair(decoded, original)
    enhanced_psnr = psnr(enhanced, original, peak)
    decoded_psnr = psnr(decoded, original, peak)

    if enhanced_psnr == decoded_psnr:
        return 0.

    return enhanced_psnr - decoded_psnr


def ycbcr_psnr(psnr_y: float, psnr_cb: float, psnr_cr: float, weights: Sequence[float] = YCBCR_PSNR_WEIGHTS) -> float:
    """
    The weighted colour PSNR, by default (6 Y + Cb + Cr) / 8. Works the same on PSNR gains.
    """

    weights = np.asarray(weights, dtype=np.float64)
    return float(np.dot(weights, [psnr_y, psnr_cb, psnr_cr]) / weights.sum())
