# -*- coding: utf-8 -*-
"""
Reading and writing point cloud frames as PLY files. ASCII and binary little-endian input
is accepted; output is always binary little-endian.
"""

import logging
import numpy as np

from plyfile import PlyData, PlyElement, PlyParseError
from pybqe.data_models.frame import PointCloudFrame
from pybqe.constants import ATTRIBUTE_PEAK

logger = logging.getLogger(__name__)

GEOMETRY_PROPERTIES = ("x", "y", "z")
COLOR_PROPERTIES = ("red", "green", "blue")
SCALAR_PROPERTY = "scalar"
IGNORED_PROPERTIES = ("nx", "ny", "nz")


class PlyFormatError(ValueError):
    """
    Raised when a PLY file cannot be turned into a frame.
    """

    def __init__(self, message: str, property_name: str = None):
        super().__init__(message)
        self.property_name = property_name


def load_ply(path: str, frame_index: int = 0, qp: int = None) -> PointCloudFrame:
    """
    Reads a frame from a PLY file, keeping the point order of the file.

    :param path: the PLY file
    :param frame_index: the index given to the frame
    :param qp: the QP the frame was compressed with, if known
    :return: the frame, with integer geometry and real attributes
    :raises: :any:`PlyFormatError` naming the offending property
    """

    try:
        vertex = PlyData.read(path)["vertex"]

    except PlyParseError as err:
        raise PlyFormatError("Malformed PLY header in `{path}`: {err}".format(path=path, err=err)) from err

    except KeyError as err:
        raise PlyFormatError(
            "The PLY file `{}` has no vertex element.".format(path),
            property_name="vertex"
        ) from err

    names = [prop.name for prop in vertex.properties]

    for name in GEOMETRY_PROPERTIES:

        if name not in names:
            raise PlyFormatError(
                "Missing geometry property `{name}` in `{path}`.".format(name=name, path=path),
                property_name=name
            )

    geometry = np.stack([np.rint(vertex[name]).astype(np.int64) for name in GEOMETRY_PROPERTIES], axis=1)
    return PointCloudFrame(
        geometry=geometry,
        attributes=_read_attributes(vertex, names, path),
        frame_index=frame_index,
        qp=qp
    )


def _read_attributes(vertex, names, path: str) -> np.ndarray:
    """
    Picks the attribute columns out of a vertex element: RGB if any colour property is
    present, otherwise the first remaining scalar property.

    :param vertex: the `plyfile` vertex element
    :param names: the property names of the element
    :param path: the file, for error messages
    :return: the n x c attributes as 64-bit reals
    """

    if any(name in names for name in COLOR_PROPERTIES):

        for name in COLOR_PROPERTIES:

            if name not in names:
                raise PlyFormatError(
                    "Missing attribute property `{name}` in `{path}`.".format(name=name, path=path),
                    property_name=name
                )

        return np.stack([vertex[name].astype(np.float64) for name in COLOR_PROPERTIES], axis=1)

    scalars = [
        name for name in names if name not in GEOMETRY_PROPERTIES and name not in IGNORED_PROPERTIES
    ]

    if len(scalars) == 0:
        raise PlyFormatError(
            "Missing attribute property in `{}`: neither red/green/blue nor a scalar.".format(path),
            property_name="red"
        )

    elif len(scalars) > 1:
        logger.warning("Several scalar properties in `%s`, using `%s`.", path, scalars[0])

    return vertex[scalars[0]].astype(np.float64).reshape(-1, 1)


def quantize_attributes(attributes: np.ndarray) -> np.ndarray:
    """
    Rounds half away from zero and clamps to the 8-bit range.

    :param attributes: the real attributes
    :return: the `uint8` attributes
    """

    rounded = np.sign(attributes) * np.floor(np.abs(attributes) + 0.5)
    return np.clip(rounded, 0, ATTRIBUTE_PEAK).astype(np.uint8)


def save_ply(frame: PointCloudFrame, path: str) -> None:
    """
    Writes a frame as a binary little-endian PLY. Three-channel frames are stored as
    red/green/blue, single-channel frames as one `scalar` property; both as `uchar`.

    :param frame: the frame to write
    :param path: the output file
    :raises: :any:`ValueError` for unsupported channel counts, :any:`OSError` if the
             path cannot be written
    """

    if frame.n_channels == 3:
        attribute_names = COLOR_PROPERTIES

    elif frame.n_channels == 1:
        attribute_names = (SCALAR_PROPERTY,)

    else:
        raise ValueError("Only 1- and 3-channel frames can be written (got {}).".format(frame.n_channels))

    dtype = [(name, "<i4") for name in GEOMETRY_PROPERTIES] + [(name, "u1") for name in attribute_names]
    data = np.empty(frame.n_points, dtype=dtype)
    quantized = quantize_attributes(frame.attributes)

    for column, name in enumerate(GEOMETRY_PROPERTIES):
        data[name] = frame.geometry[:, column]

    for column, name in enumerate(attribute_names):
        data[name] = quantized[:, column]

    try:
        PlyData([PlyElement.describe(data, "vertex")], text=False, byte_order="<").write(path)

    except OSError as err:
        raise OSError("Cannot write PLY file `{path}`: {err}".format(path=path, err=err)) from err
