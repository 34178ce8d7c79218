# -*- coding: utf-8 -*-
"""
Full-range ITU-R BT.709 conversion between RGB and YCbCr attributes. Neither direction
rounds; values stay real until a frame is written to disk.
"""

import numpy as np

from pybqe.data_models.frame import PointCloudFrame
from pybqe.constants import BT709_KR, BT709_KB, CHROMA_OFFSET, COMPONENTS


def _rgb_to_ycbcr_matrix() -> np.ndarray:
    kg = 1. - BT709_KR - BT709_KB
    luma = np.array([BT709_KR, kg, BT709_KB])
    blue_difference = (np.array([0., 0., 1.]) - luma) / (2. * (1. - BT709_KB))
    red_difference = (np.array([1., 0., 0.]) - luma) / (2. * (1. - BT709_KR))
    return np.stack([luma, blue_difference, red_difference])


RGB_TO_YCBCR = _rgb_to_ycbcr_matrix()
"""
The matrix mapping (R, G, B) columns to (Y, Cb - 128, Cr - 128).
"""

YCBCR_TO_RGB = np.linalg.inv(RGB_TO_YCBCR)
"""
The exact inverse of :any:`RGB_TO_YCBCR`.
"""

OFFSET = np.array([0., CHROMA_OFFSET, CHROMA_OFFSET])


def _check_channels(frame: PointCloudFrame) -> None:

    if frame.n_channels != 3:
        raise ValueError("Colour conversion needs 3 attribute channels (got {}).".format(frame.n_channels))


def rgb_to_ycbcr(frame: PointCloudFrame) -> PointCloudFrame:
    """
    Converts RGB attributes to Y, Cb, Cr.

    :param frame: a frame with R, G, B channels
    :return: the same frame with Y, Cb, Cr channels
    :raises: :any:`ValueError` if the frame does not have 3 channels
    """

    _check_channels(frame)
    return frame.with_attributes(frame.attributes @ RGB_TO_YCBCR.T + OFFSET)


def ycbcr_to_rgb(frame: PointCloudFrame) -> PointCloudFrame:
    """
    Converts Y, Cb, Cr attributes back to RGB.

    :param frame: a frame with Y, Cb, Cr channels
    :return: the same frame with R, G, B channels
    :raises: :any:`ValueError` if the frame does not have 3 channels
    """

    _check_channels(frame)
    return frame.with_attributes((frame.attributes - OFFSET) @ YCBCR_TO_RGB.T)


def extract_component(frame: PointCloudFrame, component: str) -> PointCloudFrame:
    """
    The single-channel frame a per-component model works on. RGB frames are converted to
    YCbCr first; single-channel frames are returned as they are.

    :param frame: an RGB or single-channel frame
    :param component: one of `y`, `cb`, `cr`
    :return: the single-channel frame
    :raises: :any:`ValueError` for an unknown component or an unsupported channel count
    """

    if component not in COMPONENTS:
        raise ValueError("Unknown component `{component}`, expected one of {known}.".format(
            component=component,
            known=list(COMPONENTS)
        ))

    elif frame.n_channels == 1:
        return frame

    _check_channels(frame)
    return rgb_to_ycbcr(frame).component(COMPONENTS.index(component))
