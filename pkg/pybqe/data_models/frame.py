# -*- coding: utf-8 -*-
"""
Point cloud frames and temporal windows. A frame holds voxelised geometry and the attributes
attached to every point; a window is the ordered run of frames centred on the frame being
enhanced.
"""

import attr
import numpy as np

from typing import Optional, Tuple
from pybqe.data_models.utils import frozen_array, array_eq, finite_values


@attr.s(frozen=True, hash=False)
class PointCloudFrame(object):
    """
    A single voxelised point cloud frame with per-point attributes.
    """

    geometry: np.ndarray = attr.ib(
        converter=frozen_array(np.int64, 2),
        eq=array_eq()
    )
    """
    The n x 3 integer voxel coordinates.
    """

    attributes: np.ndarray = attr.ib(
        converter=frozen_array(np.float64, 2),
        validator=finite_values,
        eq=array_eq()
    )
    """
    The n x c attribute values; 8-bit on disk, unconstrained reals while working.
    """

    frame_index: int = attr.ib(
        validator=attr.validators.instance_of(int),
        converter=int,
        default=0
    )
    """
    The position of the frame in its sequence.
    """

    qp: Optional[int] = attr.ib(
        validator=attr.validators.optional(attr.validators.instance_of(int)),
        converter=attr.converters.optional(int),
        default=None
    )
    """
    The QP the frame was compressed with; only known for training data.
    """

    def __attrs_post_init__(self) -> None:
        """
        A hook to check that geometry and attributes describe the same points.

        :raises: :any:`ValueError`
        """

        if self.geometry.shape[1] != 3:
            raise ValueError("Geometry has to have 3 columns (got {}).".format(self.geometry.shape[1]))

        elif self.attributes.shape[0] != self.geometry.shape[0]:
            raise ValueError("Attribute rows ({attrs}) do not match geometry rows ({geom}).".format(
                attrs=self.attributes.shape[0],
                geom=self.geometry.shape[0]
            ))

        elif self.attributes.shape[1] < 1:
            raise ValueError("A frame needs at least one attribute channel.")

        elif np.unique(self.geometry, axis=0).shape[0] != self.geometry.shape[0]:
            raise ValueError("Frame {} contains duplicate points.".format(self.frame_index))

    @property
    def n_points(self) -> int:
        return self.geometry.shape[0]

    @property
    def n_channels(self) -> int:
        return self.attributes.shape[1]

    def with_attributes(self, attributes: np.ndarray) -> "PointCloudFrame":
        """
        A copy of the frame carrying new attributes on the same geometry.

        :param attributes: the n x c replacement attributes
        :return: the new frame
        """

        return attr.evolve(self, attributes=attributes)

    def component(self, channel: int) -> "PointCloudFrame":
        """
        A single-channel copy of the frame, e.g. the luma of a YCbCr frame.

        :param channel: the index of the channel to keep
        :return: a frame with one attribute channel
        """

        if not 0 <= channel < self.n_channels:
            raise ValueError("Channel {channel} does not exist in a {count}-channel frame.".format(
                channel=channel,
                count=self.n_channels
            ))

        return self.with_attributes(self.attributes[:, channel:channel + 1])

    def subset(self, indices: np.ndarray) -> "PointCloudFrame":
        """
        The frame restricted to a set of points, in the order given.

        :param indices: the point indices to keep
        :return: the restricted frame
        """

        indices = np.asarray(indices, dtype=np.int64)
        return attr.evolve(
            self,
            geometry=self.geometry[indices],
            attributes=self.attributes[indices]
        )


@attr.s(frozen=True, hash=False)
class VirtualFrame(PointCloudFrame):
    """
    A reference frame whose attributes were transferred onto the geometry of a target frame.
    """

    source_index: int = attr.ib(
        validator=attr.validators.instance_of(int),
        converter=int,
        kw_only=True
    )
    """
    The index of the reference frame the attributes come from.
    """


def _frames_validator(instance, attribute, value) -> None:
    """
    Custom validator.

    :param instance: the `attrs` class instance
    :param attribute: the attribute
    :param value: the attribute value
    """

    if not all(isinstance(frame, PointCloudFrame) for frame in value):
        raise TypeError("A window can only hold point cloud frames.")


@attr.s(frozen=True, hash=False)
class TemporalWindow(object):
    """
    The ordered frames t-R, ..., t, ..., t+R; the centre frame is the target.
    """

    frames: Tuple[PointCloudFrame, ...] = attr.ib(
        validator=_frames_validator,
        converter=tuple
    )
    """
    The 2R+1 frames in temporal order.
    """

    radius: int = attr.ib(
        validator=attr.validators.instance_of(int),
        converter=int
    )
    """
    The window radius R.
    """

    def __attrs_post_init__(self) -> None:
        """
        A hook to check the window length and channel counts.

        :raises: :any:`ValueError`
        """

        if self.radius < 0:
            raise ValueError("The window radius has to be non-negative (got {}).".format(self.radius))

        elif len(self.frames) != 2 * self.radius + 1:
            raise ValueError("A window of radius {radius} needs {needed} frames (got {count}).".format(
                radius=self.radius,
                needed=2 * self.radius + 1,
                count=len(self.frames)
            ))

        elif len(set(frame.n_channels for frame in self.frames)) != 1:
            raise ValueError("All frames in a window must have the same number of attribute channels.")

    @property
    def target_position(self) -> int:
        return self.radius

    @property
    def target(self) -> PointCloudFrame:
        return self.frames[self.radius]

    def __len__(self) -> int:
        return len(self.frames)

    def shares_geometry(self) -> bool:
        """
        Whether every frame sits on the geometry of the target frame.

        :return: `True` if all geometries are identical, `False` otherwise
        """

        return all(np.array_equal(frame.geometry, self.target.geometry) for frame in self.frames)

    def subset(self, indices: np.ndarray) -> "TemporalWindow":
        """
        Restricts every frame to the same point indices. Only meaningful once the window
        shares the target geometry.

        :param indices: the point indices to keep
        :return: the restricted window
        """

        if not self.shares_geometry():
            raise ValueError("Only windows sharing the target geometry can be restricted to a patch.")

        return TemporalWindow(
            frames=[frame.subset(indices) for frame in self.frames],
            radius=self.radius
        )
