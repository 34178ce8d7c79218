# -*- coding: utf-8 -*-
"""
`sklearn` transformers working on whole decoded sequences, given as lists of frames.
"""

import logging
import numpy as np

from typing import Dict, List, Sequence
from sklearn.base import BaseEstimator, TransformerMixin
from pybqe.data_models.frame import PointCloudFrame
from pybqe.enhancement.inference import enhance_sequence
from pybqe.networks.model import BqeModel
from pybqe.point_cloud.color import rgb_to_ycbcr, ycbcr_to_rgb
from pybqe.constants import \
    COMPONENTS, \
    DEFAULT_PATCH_SIZE, \
    DEFAULT_RECOLOR_KERNEL, \
    DEFAULT_RECOLOR_NEIGHBOURS, \
    DEFAULT_STRIDE_FRACTION

logger = logging.getLogger(__name__)

CONVERSIONS = {
    "rgb_to_ycbcr": rgb_to_ycbcr,
    "ycbcr_to_rgb": ycbcr_to_rgb
}


class ColorSpaceTransformer(BaseEstimator, TransformerMixin):
    """
    Converts every frame of a sequence between RGB and YCbCr.
    """

    def __init__(self, direction: str = "rgb_to_ycbcr"):
        self.direction = direction

    def fit(self, X: Sequence[PointCloudFrame], *args, **kwargs):

        if self.direction not in CONVERSIONS:
            raise ValueError("Unknown conversion `{direction}`, expected one of {known}.".format(
                direction=self.direction,
                known=sorted(CONVERSIONS)
            ))

        return self

    def transform(self, X: Sequence[PointCloudFrame], **kwargs) -> List[PointCloudFrame]:
        return [CONVERSIONS[self.direction](frame) for frame in X]


class SequenceEnhancer(BaseEstimator, TransformerMixin):
    """
    Enhances a YCbCr sequence component by component. Components without a model pass through
    unchanged. A single-channel sequence is enhanced by the only model given.
    """

    def __init__(
            self,
            models: Dict[str, BqeModel] = None,
            patch_size: int = DEFAULT_PATCH_SIZE,
            stride_fraction: float = DEFAULT_STRIDE_FRACTION,
            recolor_neighbours: int = DEFAULT_RECOLOR_NEIGHBOURS,
            recolor_kernel: str = DEFAULT_RECOLOR_KERNEL
    ):
        """
        :param models: the trained model of every component to enhance, keyed `y`, `cb`, `cr`
        :param patch_size: the number of points per patch
        :param stride_fraction: the patch seed spacing
        :param recolor_neighbours: the number of reference points per recoloured point
        :param recolor_kernel: the recolouring kernel
        """

        self.models = models
        self.patch_size = patch_size
        self.stride_fraction = stride_fraction
        self.recolor_neighbours = recolor_neighbours
        self.recolor_kernel = recolor_kernel

    def fit(self, X: Sequence[PointCloudFrame], *args, **kwargs):
        """
        Checks that every model enhances the component it is registered for.
        """

        if not self.models:
            raise ValueError("At least one trained model is needed.")

        for component, model in self.models.items():

            if component not in COMPONENTS or model.config.component != component:
                raise ValueError("A model for component `{got}` is registered as `{key}`.".format(
                    got=model.config.component,
                    key=component
                ))

        return self

    def _enhance_channel(self, frames: Sequence[PointCloudFrame], channel: int, model: BqeModel) -> List[np.ndarray]:
        enhanced = enhance_sequence(
            [frame.component(channel) for frame in frames],
            model,
            patch_size=self.patch_size,
            stride_fraction=self.stride_fraction,
            recolor_neighbours=self.recolor_neighbours,
            recolor_kernel=self.recolor_kernel
        )
        return [frame.attributes[:, 0] for frame in enhanced]

    def transform(self, X: Sequence[PointCloudFrame], **kwargs) -> List[PointCloudFrame]:
        """
        :param X: the decoded frames in temporal order, YCbCr or single-channel
        :return: the enhanced frames on unchanged geometry
        """

        if X[0].n_channels == 1:

            if len(self.models) != 1:
                raise ValueError("A single-channel sequence needs exactly one model (got {}).".format(len(self.models)))

            channels = {0: next(iter(self.models.values()))}

        else:
            channels = {COMPONENTS.index(component): model for component, model in self.models.items()}

        attributes = [np.array(frame.attributes) for frame in X]

        for channel, model in sorted(channels.items()):
            logger.info("Enhancing component %s of %d frames.", model.config.component, len(X))

            for frame_attributes, enhanced in zip(attributes, self._enhance_channel(X, channel, model)):
                frame_attributes[:, channel] = enhanced

        return [frame.with_attributes(values) for frame, values in zip(X, attributes)]
