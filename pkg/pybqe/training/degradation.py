# -*- coding: utf-8 -*-
"""
A synthetic stand-in for attribute compression: uniform scalar quantisation whose step
doubles every six QPs, with unit step at QP 22.
"""

import attr
import numpy as np

from typing import Iterable, Optional
from pybqe.data_models.frame import PointCloudFrame
from pybqe.constants import ATTRIBUTE_PEAK, QP_STEP_DOUBLING, REFERENCE_QP


def quantization_step(qp: float) -> float:
    """
    :param qp: the QP
    :return: the step 2^((qp - 22) / 6)
    """

    return 2. ** ((qp - REFERENCE_QP) / QP_STEP_DOUBLING)


def degrade(frame: PointCloudFrame, qp: int, qps: Optional[Iterable[int]] = None) -> PointCloudFrame:
    """
    Quantises the attributes of a frame, a = round(a / step) * step, and clamps them to the
    8-bit range. Halves round up. Geometry is left untouched.

    :param frame: the clean frame
    :param qp: the QP
    :param qps: the configured QP set; `qp` has to belong to it when given
    :return: the degraded frame, tagged with `qp`
    :raises: :any:`ValueError` for a QP outside the configured set
    """

    if qps is not None and qp not in set(qps):
        raise ValueError("QP {qp} is not in the configured set {qps}.".format(qp=qp, qps=sorted(qps)))

    step = quantization_step(qp)
    quantized = np.floor(frame.attributes / step + 0.5) * step
    return attr.evolve(frame, attributes=np.clip(quantized, 0., ATTRIBUTE_PEAK), qp=qp)
