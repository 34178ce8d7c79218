# -*- coding: utf-8 -*-
"""
Recolouring-based motion compensation. Instead of estimating motion, the attributes of every
reference frame are transferred onto the geometry of the target frame, which yields virtual
reference frames aligned point-by-point with the target.
"""

import logging
import numpy as np

from pybqe.data_models.frame import PointCloudFrame, TemporalWindow, VirtualFrame
from pybqe.point_cloud.neighborhood import knn
from pybqe.constants import DEFAULT_RECOLOR_KERNEL, DEFAULT_RECOLOR_NEIGHBOURS

logger = logging.getLogger(__name__)


def _idw_weights(distances: np.ndarray) -> np.ndarray:
    return 1. / distances


def _gaussian_weights(distances: np.ndarray) -> np.ndarray:
    bandwidth = distances.mean(axis=1, keepdims=True)
    return np.exp(-0.5 * (distances / bandwidth) ** 2)


KERNELS = {
    "idw": _idw_weights,
    "gaussian": _gaussian_weights
}
"""
The weighting kernels available for recolouring, keyed by name.
"""


def recolor(
        reference: PointCloudFrame,
        target_geometry: np.ndarray,
        k_r: int = DEFAULT_RECOLOR_NEIGHBOURS,
        kernel: str = DEFAULT_RECOLOR_KERNEL,
        target_index: int = None
) -> VirtualFrame:
    """
    Transfers the attributes of a reference frame onto a target geometry. A target point that
    coincides with a reference point copies its attributes; any other point takes the
    weighted mean of its `k_r` nearest reference points, by default with inverse distance
    weights sum(a_j / d_j) / sum(1 / d_j).

    :param reference: the frame providing the attributes
    :param target_geometry: the n x 3 geometry receiving them
    :param k_r: the number of reference points per target point; capped at the reference size
    :param kernel: the weighting kernel, `idw` or `gaussian`
    :param target_index: the frame index given to the virtual frame; defaults to the
                         reference index
    :return: the virtual frame on the target geometry
    :raises: :any:`ValueError` for an empty reference, `k_r` < 1 or an unknown kernel
    """

    if reference.n_points == 0:
        raise ValueError("Cannot recolour from an empty reference frame.")

    elif k_r < 1:
        raise ValueError("At least one reference neighbour is needed (got {}).".format(k_r))

    elif kernel not in KERNELS:
        raise ValueError("Unknown recolouring kernel `{kernel}`, expected one of {known}.".format(
            kernel=kernel,
            known=sorted(KERNELS)
        ))

    target_geometry = np.asarray(target_geometry, dtype=np.int64)
    neighbours = knn(target_geometry, reference.geometry, min(k_r, reference.n_points))
    exact = neighbours.distances[:, 0] == 0
    attributes = np.empty((target_geometry.shape[0], reference.n_channels))
    attributes[exact] = reference.attributes[neighbours.indices[exact, 0]]

    if not exact.all():
        distances = neighbours.distances[~exact]
        weights = KERNELS[kernel](distances)
        weights = weights / weights.sum(axis=1, keepdims=True)
        gathered = reference.attributes[neighbours.indices[~exact]]
        attributes[~exact] = (weights[:, :, None] * gathered).sum(axis=1)

    return VirtualFrame(
        geometry=target_geometry,
        attributes=attributes,
        frame_index=reference.frame_index if target_index is None else target_index,
        qp=reference.qp,
        source_index=reference.frame_index
    )


def compensate_window(
        window: TemporalWindow,
        k_r: int = DEFAULT_RECOLOR_NEIGHBOURS,
        kernel: str = DEFAULT_RECOLOR_KERNEL
) -> TemporalWindow:
    """
    Replaces every reference frame of a window by its recolouring onto the target geometry.
    The target frame itself is passed through untouched.

    :param window: the window to align
    :param k_r: the number of reference points per target point
    :param kernel: the weighting kernel
    :return: a window whose frames all share the target geometry
    """

    target = window.target
    frames = []

    for position, frame in enumerate(window.frames):

        if position == window.target_position:
            frames.append(target)

        else:
            frames.append(recolor(frame, target.geometry, k_r=k_r, kernel=kernel, target_index=target.frame_index))

    logger.debug("Compensated a window of %d frames around frame %d.", len(frames), target.frame_index)
    return TemporalWindow(frames=frames, radius=window.radius)
