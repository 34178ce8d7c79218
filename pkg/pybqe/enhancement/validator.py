# -*- coding: utf-8 -*-
"""
A sequence checker/validator that can be used as part of an `sklearn` pipeline.
It implements the :class:`TransformerMixin` interface, even though it does _not_ transform
the frames apart from ordering them in time.
"""

import numpy as np

from typing import List, Sequence
from sklearn.base import BaseEstimator, TransformerMixin
from pybqe.data_models.frame import PointCloudFrame
from pybqe.constants import ATTRIBUTE_PEAK, NUMERIC_ACCURACY


class SequenceValidator(BaseEstimator, TransformerMixin):
    """
    Checks that a decoded sequence can be enhanced: frames of one channel count, with 8-bit
    attribute values and distinct frame indices.
    """

    def __init__(self, n_channels: int = None):
        """
        :param n_channels: the channel count every frame has to have; if it's provided, `fit`
                           won't change it
        """

        self.n_channels = n_channels

    def fit(self, X: Sequence[PointCloudFrame], *args, **kwargs):
        """
        Takes the channel count of the first frame unless one was given.

        :param X: the frames
        """

        if self.n_channels is None and len(X) > 0:
            self.n_channels = X[0].n_channels

        return self

    def transform(self, X: Sequence[PointCloudFrame], **kwargs) -> List[PointCloudFrame]:
        """
        Throws a :any:`ValueError` if the sequence cannot be enhanced.

        :param X: the frames
        :return: the frames sorted by frame index
        """

        if self.n_channels is None:
            raise ValueError("Please fit the validator before applying it!")

        elif len(X) == 0:
            raise ValueError("The sequence holds no frames.")

        for frame in X:

            if not isinstance(frame, PointCloudFrame):
                raise ValueError("Expected point cloud frames, got `{}`.".format(type(frame).__name__))

            elif frame.n_channels != self.n_channels:
                raise ValueError("Frame {index} has {got} channels instead of {want}.".format(
                    index=frame.frame_index,
                    got=frame.n_channels,
                    want=self.n_channels
                ))

            elif frame.n_points == 0:
                raise ValueError("Frame {} is empty.".format(frame.frame_index))

            elif frame.attributes.min() < -NUMERIC_ACCURACY or frame.attributes.max() - ATTRIBUTE_PEAK > NUMERIC_ACCURACY:
                raise ValueError("Frame {index} has attributes outside [0, {peak}].".format(
                    index=frame.frame_index,
                    peak=ATTRIBUTE_PEAK
                ))

        indices = [frame.frame_index for frame in X]

        if len(set(indices)) != len(indices):
            raise ValueError("Frame indices repeat: {}.".format(sorted(indices)))

        return [X[position] for position in np.argsort(indices, kind="stable")]
