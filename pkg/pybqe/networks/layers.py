# -*- coding: utf-8 -*-
"""
Small building blocks shared by the networks.
"""

import os
import random
import logging
import contextlib
import numpy as np
import torch

from torch import nn
from typing import Sequence
from pybqe.constants import LEAKY_RELU_SLOPE, NUM_THREADS_ENV_VAR

logger = logging.getLogger(__name__)


def pointwise_mlp(
        widths: Sequence[int],
        negative_slope: float = LEAKY_RELU_SLOPE,
        final_activation: bool = False
) -> nn.Sequential:
    """
    Linear layers applied to the last axis (1 x 1 convolutions over points) with LeakyReLU
    between them.

    :param widths: the input width followed by the output width of every layer
    :param negative_slope: the LeakyReLU negative slope
    :param final_activation: whether the last layer is followed by a LeakyReLU too
    :return: the layer stack
    """

    layers = []

    for position, (width_in, width_out) in enumerate(zip(widths, widths[1:])):
        layers.append(nn.Linear(width_in, width_out))

        if final_activation or position < len(widths) - 2:
            layers.append(nn.LeakyReLU(negative_slope))

    return nn.Sequential(*layers)


def normalize_geometry(geometry: torch.Tensor) -> torch.Tensor:
    """
    Centres coordinates on their centroid and scales them to unit radius.

    :param geometry: the n x 3 coordinates
    :return: the normalised coordinates
    """

    centred = geometry - geometry.mean(dim=0, keepdim=True)
    radius = centred.norm(dim=1).max().clamp(min=1.)
    return centred / radius


def zero_module(module: nn.Module) -> nn.Module:
    """
    Sets every parameter of a module to zero.

    :param module: the module
    :return: the same module
    """

    with torch.no_grad():

        for parameter in module.parameters():
            parameter.zero_()

    return module


@contextlib.contextmanager
def default_dtype(dtype: torch.dtype):
    """
    Temporarily switches the dtype new parameters are created with, so that an
    initialisation draws the same values whatever the global setting is.

    :param dtype: the dtype to use inside the block
    """

    previous = torch.get_default_dtype()
    torch.set_default_dtype(dtype)

    try:
        yield

    finally:
        torch.set_default_dtype(previous)


@contextlib.contextmanager
def torch_session(seed: int, deterministic: bool = True):
    """
    Seeds `torch`, switches to 64-bit parameters and sets the deterministic-algorithms flag
    for the duration of the block. The generator state, the default dtype and the flag are
    restored on exit.

    :param seed: the seed
    :param deterministic: whether to enforce deterministic algorithms inside the block
    """

    was_deterministic = torch.are_deterministic_algorithms_enabled()

    with torch.random.fork_rng(devices=[]), default_dtype(torch.float64):
        torch.manual_seed(seed)
        torch.use_deterministic_algorithms(deterministic)

        try:
            yield

        finally:
            torch.use_deterministic_algorithms(was_deterministic)


def configure_torch(seed: int, deterministic: bool = True) -> None:
    """
    Process-wide set-up for the command line: seeds every random generator in use, sets a
    64-bit default dtype, deterministic kernels on request and the thread cap from the
    environment. Library code uses :func:`torch_session` instead.

    :param seed: the seed
    :param deterministic: whether to enforce deterministic algorithms
    """

    random.seed(seed)
    np.random.seed(seed % (2 ** 32))
    torch.manual_seed(seed)
    torch.set_default_dtype(torch.float64)
    torch.use_deterministic_algorithms(deterministic)
    threads = os.environ.get(NUM_THREADS_ENV_VAR)

    if threads is not None:
        torch.set_num_threads(int(threads))
        logger.debug("Capped torch at %s threads.", threads)
