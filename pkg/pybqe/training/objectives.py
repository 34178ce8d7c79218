# -*- coding: utf-8 -*-
"""
Training objectives: QP centres, Gaussian soft labels over distortion levels, the quality
estimation loss and the enhancement loss.
"""

import numpy as np
import torch

from typing import Tuple, Union
from pybqe.data_models.quality import DistortionGrouping, QualityVector, SoftLabel
from pybqe.constants import LOG_CLAMP


def qp_centers(grouping: DistortionGrouping) -> Tuple[float, float, float]:
    """
    :param grouping: the QP grouping
    :return: the mean QP of the low, medium and high distortion levels
    """

    return grouping.centers


def soft_label(qp: float, grouping: DistortionGrouping) -> SoftLabel:
    """
    The Gaussian-kernel label of a QP: g_i is proportional to exp(-((q - c_i) / sigma)^2 / 2).

    :param qp: the QP
    :param grouping: the QP grouping and kernel width
    :return: the soft label
    """

    exponents = -0.5 * ((float(qp) - np.asarray(grouping.centers)) / grouping.sigma) ** 2
    weights = np.exp(exponents - exponents.max())
    low, medium, high = weights / weights.sum()
    return SoftLabel(low=low, medium=medium, high=high)


def entropy(label: Union[SoftLabel, np.ndarray]) -> float:
    """
    The Shannon entropy (nats) of a label, the lower bound of :func:`qe_loss`.
    """

    values = _as_array(label)
    positive = values[values > 0]
    return float(-(positive * np.log(positive)).sum())


def _as_array(value) -> np.ndarray:

    if isinstance(value, (QualityVector, SoftLabel)):
        return value.as_array()

    return np.asarray(value, dtype=np.float64)


def _as_tensor(value, like: torch.Tensor = None) -> torch.Tensor:

    if isinstance(value, torch.Tensor):
        return value

    return torch.as_tensor(_as_array(value), dtype=torch.float64 if like is None else like.dtype)


def qe_loss(quality, label) -> torch.Tensor:
    """
    The cross-entropy -sum_i g_i log(p_i) between a soft label and an estimated quality vector.
    Probabilities are clamped below before the logarithm.

    :param quality: the estimated quality vector p (tensor, array or :class:`QualityVector`)
    :param label: the soft label g (tensor, array or :class:`SoftLabel`)
    :return: the scalar loss
    :raises: :any:`ValueError` if the two vectors differ in shape
    """

    quality = _as_tensor(quality)
    label = _as_tensor(label, like=quality)

    if quality.shape != label.shape:
        raise ValueError("Quality shape {p} differs from label shape {g}.".format(
            p=tuple(quality.shape),
            g=tuple(label.shape)
        ))

    return -(label * torch.log(quality.clamp(min=LOG_CLAMP))).sum()


def bqe_loss(enhanced, original) -> torch.Tensor:
    """
    The squared error between enhanced and original attributes, summed over channels and
    averaged over points.

    :param enhanced: the n x c enhanced attributes
    :param original: the n x c original attributes
    :return: the scalar loss
    :raises: :any:`ValueError` for differing shapes or no points
    """

    enhanced = _as_tensor(enhanced)
    original = _as_tensor(original, like=enhanced)

    if enhanced.shape != original.shape:
        raise ValueError("Enhanced shape {e} differs from original shape {o}.".format(
            e=tuple(enhanced.shape),
            o=tuple(original.shape)
        ))

    elif enhanced.shape[0] == 0:
        raise ValueError("The loss needs at least one point.")

    squared = (enhanced - original) ** 2
    return squared.reshape(squared.shape[0], -1).sum(dim=1).mean()
