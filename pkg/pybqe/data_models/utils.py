# -*- coding: utf-8 -*-
"""
Utility methods used in definitions of data models.
"""

import attr
import numpy as np

from typing import Callable, Sequence
from pybqe.constants import NUMERIC_ACCURACY


def frozen_array(dtype: type, ndim: int) -> Callable:
    """
    Builds an `attrs` converter that copies its input into a read-only `numpy` array.

    :param dtype: the dtype of the stored array
    :param ndim: the number of dimensions the array must have; 1-d input to a 2-d field is
                 treated as a single column
    :return: the converter
    """

    def _convert(value) -> np.ndarray:
        array = np.array(value, dtype=dtype, copy=True)

        if ndim == 2 and array.ndim == 1:
            array = array.reshape(-1, 1)

        if array.ndim != ndim:
            raise ValueError("Expected a {ndim}-d array, got shape {shape}.".format(
                ndim=ndim,
                shape=array.shape
            ))

        array.setflags(write=False)
        return array

    return _convert


def array_eq() -> Callable:
    """
    An `attrs` comparison that compares arrays element-wise and by shape.

    :return: an `attr.cmp_using` instance to be used as `eq` of an array attribute
    """

    return attr.cmp_using(eq=np.array_equal)


def finite_values(instance, attribute, value) -> None:
    """
    Custom validator rejecting NaN and infinite entries.

    :param instance: the `attrs` class instance
    :param attribute: the attribute
    :param value: the attribute value
    """

    if not np.all(np.isfinite(value)):
        raise ValueError("The attribute `{name}` contains non-finite values.".format(name=attribute.name))


def non_negative(instance, attribute, value) -> None:
    """
    Custom validator rejecting negative numbers.

    :param instance: the `attrs` class instance
    :param attribute: the attribute
    :param value: the attribute value
    """

    if np.any(np.asarray(value) < 0):
        raise ValueError("The attribute `{name}` has to be non-negative (got {value}).".format(
            name=attribute.name,
            value=value
        ))


def positive(instance, attribute, value) -> None:
    """
    Custom validator rejecting zero and negative numbers.

    :param instance: the `attrs` class instance
    :param attribute: the attribute
    :param value: the attribute value
    """

    if value is not None and value <= 0:
        raise ValueError("The attribute `{name}` has to be positive (got {value}).".format(
            name=attribute.name,
            value=value
        ))


def check_simplex(
        values: Sequence[float],
        name: str,
        numeric_accuracy: float = NUMERIC_ACCURACY
) -> None:
    """
    Checks that a vector is a probability distribution.

    :param values: the vector in question
    :param name: the name used in the error message
    :param numeric_accuracy: the tolerance allowed on the sum
    :raises: :any:`ValueError` in case the vector is not a probability distribution
    """

    values = np.asarray(values, dtype=np.float64)

    if np.any(values < 0) or np.any(values > 1):
        raise ValueError("Every entry of `{name}` has to lie in [0, 1] (got {values}).".format(
            name=name,
            values=values.tolist()
        ))

    elif abs(values.sum() - 1.) > numeric_accuracy:
        raise ValueError("The entries of `{name}` have to sum to one (got {total}).".format(
            name=name,
            total=values.sum()
        ))
