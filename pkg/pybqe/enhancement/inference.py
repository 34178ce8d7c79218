# -*- coding: utf-8 -*-
"""
Frame-level inference. Frames are cut into patches, every patch goes through the network on
its own, and the per-patch outputs are averaged back onto the frame.
"""

import logging
import numpy as np
import torch

from typing import List, Sequence, Tuple
from pybqe.data_models.frame import PointCloudFrame, TemporalWindow
from pybqe.data_models.neighborhood import NeighborIndex
from pybqe.data_models.quality import QualityVector
from pybqe.networks.model import BqeModel, QualityEstimator
from pybqe.point_cloud.neighborhood import knn
from pybqe.point_cloud.patches import fuse_patches, generate_patches
from pybqe.point_cloud.recolor import compensate_window
from pybqe.point_cloud.window import make_window
from pybqe.constants import \
    DEFAULT_PATCH_SIZE, \
    DEFAULT_RECOLOR_KERNEL, \
    DEFAULT_RECOLOR_NEIGHBOURS, \
    DEFAULT_STRIDE_FRACTION

logger = logging.getLogger(__name__)


def window_tensor(window: TemporalWindow) -> torch.Tensor:
    """
    :param window: a window whose frames share geometry
    :return: the (2R+1) x n x c attribute tensor
    """

    return torch.as_tensor(np.stack([frame.attributes for frame in window.frames]), dtype=torch.float64)


def geometry_tensor(frame: PointCloudFrame) -> torch.Tensor:
    return torch.as_tensor(frame.geometry, dtype=torch.float64)


def neighbor_tensors(neighbors: NeighborIndex) -> Tuple[torch.Tensor, torch.Tensor]:
    """
    :param neighbors: the neighbour index
    :return: the positions as a long tensor and the distances as a float tensor
    """

    return (
        torch.as_tensor(neighbors.indices, dtype=torch.long),
        torch.as_tensor(neighbors.distances, dtype=torch.float64)
    )


def _patch_neighbors(frame: PointCloudFrame, k: int) -> NeighborIndex:
    return knn(frame.geometry, frame.geometry, min(k, frame.n_points))


def qe_forward(
        target: PointCloudFrame,
        quality_estimator: QualityEstimator,
        patch_size: int = DEFAULT_PATCH_SIZE,
        stride_fraction: float = DEFAULT_STRIDE_FRACTION
) -> QualityVector:
    """
    Estimates the distortion level of a whole frame. Point features are computed per patch,
    averaged over overlapping patches and pooled over the frame.

    :param target: the decoded frame
    :param quality_estimator: the trained estimator
    :param patch_size: the number of points per patch
    :param stride_fraction: the patch seed spacing
    :return: the quality vector
    :raises: :any:`ValueError` for an empty frame
    """

    if target.n_points == 0:
        raise ValueError("Cannot estimate the quality of an empty frame.")

    outputs = []

    with torch.no_grad():

        for patch in generate_patches(target, patch_size, stride_fraction).patches:
            restricted = target.subset(patch)
            index, distances = neighbor_tensors(_patch_neighbors(restricted, quality_estimator.config.neighbours))
            features = quality_estimator.features(
                torch.as_tensor(restricted.attributes, dtype=torch.float64),
                geometry_tensor(restricted),
                index,
                distances
            )
            outputs.append((patch, features.numpy()))

        fused = torch.as_tensor(fuse_patches(outputs, target.n_points))
        return QualityVector.from_array(quality_estimator.classify(fused).numpy())


def bqe_forward(
        window: TemporalWindow,
        model: BqeModel,
        patch_size: int = DEFAULT_PATCH_SIZE,
        stride_fraction: float = DEFAULT_STRIDE_FRACTION,
        recolor_neighbours: int = DEFAULT_RECOLOR_NEIGHBOURS,
        recolor_kernel: str = DEFAULT_RECOLOR_KERNEL
) -> PointCloudFrame:
    """
    Enhances the target of a window: the window is recoloured onto the target geometry, the
    quality of the target is estimated once for the whole frame, and every patch is enhanced
    with that quality vector.

    :param window: the decoded window
    :param model: the trained model
    :param patch_size: the number of points per patch
    :param stride_fraction: the patch seed spacing
    :param recolor_neighbours: the number of reference points per recoloured point
    :param recolor_kernel: the recolouring kernel
    :return: the target frame with enhanced attributes; geometry is copied unchanged
    :raises: :any:`ValueError` if the window does not fit the model
    """

    target = window.target

    if target.n_channels != model.config.attribute_channels:
        raise ValueError("The model enhances {want} channel(s), the frame has {got}.".format(
            want=model.config.attribute_channels,
            got=target.n_channels
        ))

    elif window.radius != model.config.radius:
        raise ValueError("The model expects a window radius of {want}, got {got}.".format(
            want=model.config.radius,
            got=window.radius
        ))

    compensated = compensate_window(window, k_r=recolor_neighbours, kernel=recolor_kernel)

    if model.quality_estimator is None:
        quality = model.fixed_quality()

    else:
        estimated = qe_forward(target, model.quality_estimator, patch_size, stride_fraction)
        quality = torch.as_tensor(estimated.as_array())

    outputs = []

    with torch.no_grad():

        for patch in generate_patches(target, patch_size, stride_fraction).patches:
            restricted = compensated.subset(patch)
            index, distances = neighbor_tensors(_patch_neighbors(restricted.target, model.config.neighbours))
            enhanced, _ = model(window_tensor(restricted), geometry_tensor(restricted.target), index, distances, quality)
            outputs.append((patch, enhanced.numpy()))

    logger.debug("Enhanced frame %d with quality %s.", target.frame_index, quality.tolist())
    return target.with_attributes(fuse_patches(outputs, target.n_points))


def enhance_sequence(sequence: Sequence[PointCloudFrame], model: BqeModel, **kwargs) -> List[PointCloudFrame]:
    """
    Enhances every frame of a decoded single-component sequence with windows clamped at the
    sequence ends.

    :param sequence: the decoded frames in temporal order
    :param model: the trained model
    :param kwargs: passed on to :func:`bqe_forward`
    :return: the enhanced frames
    """

    model.eval()
    return [
        bqe_forward(make_window(sequence, t, model.config.radius), model, **kwargs)
        for t in range(len(sequence))
    ]
