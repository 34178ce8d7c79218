# -*- coding: utf-8 -*-
"""
Data models for training samples and the per-epoch training record.
"""

import attr
import numpy as np

from pybqe.data_models.frame import TemporalWindow
from pybqe.data_models.neighborhood import NeighborIndex
from pybqe.data_models.utils import frozen_array, array_eq


@attr.s(frozen=True, hash=False)
class TrainingSample(object):
    """
    A degraded, motion-compensated window patch paired with the clean target attributes.
    """

    window: TemporalWindow = attr.ib(
        validator=attr.validators.instance_of(TemporalWindow)
    )
    """
    The degraded window, already sitting on the target patch geometry.
    """

    original: np.ndarray = attr.ib(
        converter=frozen_array(np.float64, 2),
        eq=array_eq()
    )
    """
    The clean attributes of the target patch.
    """

    qp: int = attr.ib(
        validator=attr.validators.instance_of(int),
        converter=int
    )
    """
    The QP the window was degraded with.
    """

    neighbors: NeighborIndex = attr.ib(
        validator=attr.validators.instance_of(NeighborIndex)
    )
    """
    The k nearest neighbours of every patch point within the patch.
    """

    def __attrs_post_init__(self) -> None:
        """
        A hook to check that the window, the ground truth and the neighbours describe the
        same points.

        :raises: :any:`ValueError`
        """

        if not self.window.shares_geometry():
            raise ValueError("Training windows have to share the target geometry.")

        elif self.original.shape != self.window.target.attributes.shape:
            raise ValueError("Ground truth shape {orig} differs from the target shape {target}.".format(
                orig=self.original.shape,
                target=self.window.target.attributes.shape
            ))

        elif self.neighbors.indices.shape[0] != self.window.target.n_points:
            raise ValueError("The neighbour index does not cover the patch.")


@attr.s(frozen=True)
class EpochRecord(object):
    """
    One line of the training log.
    """

    epoch: int = attr.ib(converter=int)
    stage: str = attr.ib(validator=attr.validators.in_(("qe", "bqe")))
    loss: float = attr.ib(converter=float)
    seconds: float = attr.ib(converter=float)


@attr.s(frozen=True)
class PairEntry(object):
    """
    One row of a manifest of pre-degraded frames, e.g. decoded by a real codec.
    """

    clean_path: str = attr.ib(validator=attr.validators.instance_of(str))
    """
    The PLY file of the original frame.
    """

    degraded_path: str = attr.ib(validator=attr.validators.instance_of(str))
    """
    The PLY file of the decoded frame; it has to share the geometry of the original.
    """

    qp: int = attr.ib(converter=int)
    frame_index: int = attr.ib(converter=int)
