# -*- coding: utf-8 -*-
"""
Saving and loading of trained models. A checkpoint is a `torch.save` container holding the
format version, the kind of model, the colour component, the model configuration and the
named parameter tensors:

    {
        "format_version": 1,
        "kind": "qe" | "bqe",
        "component": "y" | "cb" | "cr",
        "config": {...},          # ModelConfig fields
        "state_dict": {...}       # name -> tensor
    }
"""

import hashlib
import logging
import cattr
import torch

from torch import nn
from typing import Union
from pybqe.data_models.config import ModelConfig
from pybqe.networks.model import BqeModel, QualityEstimator
from pybqe.constants import CHECKPOINT_FORMAT_VERSION

logger = logging.getLogger(__name__)

KINDS = {
    "qe": QualityEstimator,
    "bqe": BqeModel
}


def _kind_of(model: nn.Module) -> str:

    for kind, cls in KINDS.items():

        if isinstance(model, cls):
            return kind

    raise ValueError("Cannot checkpoint a `{}`.".format(type(model).__name__))


def save_checkpoint(model: Union[BqeModel, QualityEstimator], path: str) -> None:
    """
    Writes a model to disk.

    :param model: a quality estimator or a full model
    :param path: the output file
    :raises: :any:`OSError` if the file cannot be written
    """

    container = {
        "format_version": CHECKPOINT_FORMAT_VERSION,
        "kind": _kind_of(model),
        "component": model.config.component,
        "config": cattr.unstructure(model.config),
        "state_dict": {name: tensor.detach().clone() for name, tensor in model.state_dict().items()}
    }

    try:
        torch.save(container, path)

    except (OSError, RuntimeError) as error:
        raise OSError("Cannot write checkpoint `{path}`: {error}".format(path=path, error=error)) from error

    logger.info("Saved %s checkpoint to %s.", container["kind"], path)


def load_checkpoint(path: str, kind: str = None) -> Union[BqeModel, QualityEstimator]:
    """
    Rebuilds a model from disk.

    :param path: the checkpoint file
    :param kind: the expected kind, `qe` or `bqe`; any kind if absent
    :return: the model, in evaluation mode
    :raises: :any:`ValueError` for an unknown format version or a kind mismatch
    """

    container = torch.load(path, map_location="cpu", weights_only=True)

    if container.get("format_version") != CHECKPOINT_FORMAT_VERSION:
        raise ValueError("Checkpoint `{path}` has format version {got}, expected {want}.".format(
            path=path,
            got=container.get("format_version"),
            want=CHECKPOINT_FORMAT_VERSION
        ))

    elif container["kind"] not in KINDS or (kind is not None and container["kind"] != kind):
        raise ValueError("Checkpoint `{path}` holds a `{got}` model, expected `{want}`.".format(
            path=path,
            got=container["kind"],
            want=kind
        ))

    config = cattr.structure(container["config"], ModelConfig)
    model = KINDS[container["kind"]](config)
    model.load_state_dict(container["state_dict"])
    model.eval()
    return model


def parameter_checksum(module: nn.Module) -> str:
    """
    A SHA-256 digest over the names and raw bytes of every tensor in a module's state.

    :param module: the module
    :return: the hex digest
    """

    digest = hashlib.sha256()

    for name, tensor in sorted(module.state_dict().items()):
        digest.update(name.encode("utf-8"))
        digest.update(tensor.detach().cpu().contiguous().numpy().tobytes())

    return digest.hexdigest()
