# -*- coding: utf-8 -*-
"""
Assembly of temporal windows around a target frame.
"""

from typing import Sequence
from pybqe.data_models.frame import PointCloudFrame, TemporalWindow


def make_window(sequence: Sequence[PointCloudFrame], t: int, radius: int) -> TemporalWindow:
    """
    Collects frames t-R, ..., t+R. Positions before the first or after the last frame repeat
    the nearest available frame.

    :param sequence: the frames of the sequence, in temporal order
    :param t: the position of the target frame
    :param radius: the window radius R
    :return: the window of 2R+1 frames
    :raises: :any:`ValueError` for an empty sequence, a target outside it or a negative radius
    """

    if len(sequence) == 0:
        raise ValueError("Cannot build a window from an empty sequence.")

    elif not 0 <= t < len(sequence):
        raise ValueError("Target position {t} is outside a sequence of {n} frames.".format(t=t, n=len(sequence)))

    elif radius < 0:
        raise ValueError("The window radius has to be non-negative (got {}).".format(radius))

    last = len(sequence) - 1
    return TemporalWindow(
        frames=[sequence[min(max(position, 0), last)] for position in range(t - radius, t + radius + 1)],
        radius=radius
    )
