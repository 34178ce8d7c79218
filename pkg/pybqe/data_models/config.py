# -*- coding: utf-8 -*-
"""
Configuration objects for models and training runs, plus the manifest written after every
command. All of them serialise to plain JSON through `cattrs`.
"""

import json
import attr
import cattr

from typing import Dict, List, Optional, Tuple
from pybqe.data_models.quality import DistortionGrouping
from pybqe.data_models.utils import positive
from pybqe.constants import \
    COMPONENTS, \
    DEFAULT_BATCH_SIZE, \
    DEFAULT_EPOCHS, \
    DEFAULT_LEARNING_RATE, \
    DEFAULT_LR_SCHEDULE, \
    DEFAULT_NEIGHBOURS, \
    DEFAULT_PATCH_SIZE, \
    DEFAULT_QP_GROUPS, \
    DEFAULT_RADIUS, \
    DEFAULT_RECOLOR_KERNEL, \
    DEFAULT_RECOLOR_NEIGHBOURS, \
    DEFAULT_SEED, \
    DEFAULT_SIGMA, \
    DEFAULT_STRIDE_FRACTION, \
    DEFAULT_VALIDATION_FRACTION, \
    LEAKY_RELU_SLOPE, \
    LR_SCHEDULES

ABLATIONS = ("no-tcca", "no-pe", "no-na", "no-qe")
"""
The switches that remove one module from the full model.
"""


def _stage_depths_validator(instance, attribute, value) -> None:
    """
    Custom validator.

    :param instance: the `attrs` class instance
    :param attribute: the attribute
    :param value: the attribute value
    """

    if len(value) != 3:
        raise ValueError("Exactly three stage depths are needed (got {}).".format(list(value)))

    elif value[0] < 1 or any(later <= earlier for earlier, later in zip(value, value[1:])):
        raise ValueError("Stage depths have to be positive and strictly increasing (got {}).".format(list(value)))


@attr.s(frozen=True)
class ModelConfig(object):
    """
    The architecture of one per-component enhancement model.
    """

    component: str = attr.ib(
        validator=attr.validators.in_(COMPONENTS),
        default="y"
    )
    """
    The colour component the model enhances.
    """

    radius: int = attr.ib(converter=int, default=DEFAULT_RADIUS)
    """
    The temporal window radius R.
    """

    neighbours: int = attr.ib(converter=int, validator=positive, default=DEFAULT_NEIGHBOURS)
    """
    The number of nearest neighbours k of the neighbourhood attention.
    """

    attribute_channels: int = attr.ib(converter=int, validator=positive, default=1)
    """
    The number of attribute channels enhanced at once.
    """

    tcca_hidden_width: int = attr.ib(converter=int, validator=positive, default=32)
    """
    The width of the hidden layers of the query, key and value projections.
    """

    key_width: int = attr.ib(converter=int, validator=positive, default=64)
    """
    The query/key embedding width d_k (also used for the values).
    """

    tcca_width: int = attr.ib(converter=int, validator=positive, default=16)
    """
    The output width of the cross-attention output projection.
    """

    trunk_width: int = attr.ib(converter=int, validator=positive, default=64)
    """
    The width of the shared progressive trunk.
    """

    branch_width: int = attr.ib(converter=int, validator=positive, default=64)
    """
    The width c_f of the low, medium and high distortion branch features.
    """

    growth_width: int = attr.ib(converter=int, validator=positive, default=32)
    """
    The output width of every neighbourhood attention layer inside a dense block.
    """

    na_layers_per_block: int = attr.ib(converter=int, validator=positive, default=2)
    """
    The number of neighbourhood attention layers in one densely connected block.
    """

    stage_depths: Tuple[int, int, int] = attr.ib(
        converter=lambda depths: tuple(int(depth) for depth in depths),
        validator=_stage_depths_validator,
        default=(1, 2, 3)
    )
    """
    The cumulative number of dense blocks behind the shallow, medium and deep taps.
    """

    qe_width: int = attr.ib(converter=int, validator=positive, default=32)
    """
    The feature width of the quality estimation module.
    """

    qe_na_layers: int = attr.ib(converter=int, validator=positive, default=2)
    """
    The number of neighbourhood attention layers of the quality estimation module.
    """

    negative_slope: float = attr.ib(converter=float, default=LEAKY_RELU_SLOPE)
    """
    The LeakyReLU negative slope.
    """

    ablation: Optional[str] = attr.ib(
        validator=attr.validators.optional(attr.validators.in_(ABLATIONS)),
        default=None
    )
    """
    The module removed from the full model, if any.
    """

    zero_init_head: bool = attr.ib(converter=bool, default=False)
    """
    Whether the reconstruction head starts at zero, making the untrained model the identity.
    By default it gets the same uniform fan-in initialisation as every other layer.
    """

    seed: int = attr.ib(converter=int, default=DEFAULT_SEED)
    """
    The seed of the parameter initialisation.
    """

    def __attrs_post_init__(self) -> None:
        """
        :raises: :any:`ValueError`
        """

        if self.radius < 0:
            raise ValueError("The window radius has to be non-negative (got {}).".format(self.radius))

    @property
    def uses_quality_estimator(self) -> bool:
        return self.ablation != "no-qe"


def _qp_groups_converter(groups: Dict) -> Dict[str, Tuple[int, ...]]:
    return DistortionGrouping(groups=groups).groups


@attr.s(frozen=True)
class TrainingConfig(object):
    """
    Hyperparameters of both training stages and of dataset assembly.
    """

    epochs: int = attr.ib(converter=int, validator=positive, default=DEFAULT_EPOCHS)
    batch_size: int = attr.ib(converter=int, validator=positive, default=DEFAULT_BATCH_SIZE)
    learning_rate: float = attr.ib(converter=float, default=DEFAULT_LEARNING_RATE)
    lr_schedule: str = attr.ib(validator=attr.validators.in_(LR_SCHEDULES), default=DEFAULT_LR_SCHEDULE)
    radius: int = attr.ib(converter=int, default=DEFAULT_RADIUS)
    neighbours: int = attr.ib(converter=int, validator=positive, default=DEFAULT_NEIGHBOURS)
    sigma: float = attr.ib(converter=float, validator=positive, default=DEFAULT_SIGMA)
    seed: int = attr.ib(converter=int, default=DEFAULT_SEED)
    patch_size: int = attr.ib(converter=int, validator=positive, default=DEFAULT_PATCH_SIZE)
    stride_fraction: float = attr.ib(converter=float, validator=positive, default=DEFAULT_STRIDE_FRACTION)
    qp_groups: Dict[str, Tuple[int, ...]] = attr.ib(
        converter=_qp_groups_converter,
        default=DEFAULT_QP_GROUPS,
        hash=False
    )
    recolor_neighbours: int = attr.ib(converter=int, validator=positive, default=DEFAULT_RECOLOR_NEIGHBOURS)
    recolor_kernel: str = attr.ib(validator=attr.validators.in_(("idw", "gaussian")), default=DEFAULT_RECOLOR_KERNEL)
    validation_fraction: float = attr.ib(converter=float, default=DEFAULT_VALIDATION_FRACTION)
    max_steps: Optional[int] = attr.ib(
        converter=attr.converters.optional(int),
        validator=attr.validators.optional(positive),
        default=None
    )
    grad_clip: Optional[float] = attr.ib(
        converter=attr.converters.optional(float),
        validator=attr.validators.optional(positive),
        default=None
    )
    deterministic: bool = attr.ib(converter=bool, default=True)

    def __attrs_post_init__(self) -> None:
        """
        :raises: :any:`ValueError`
        """

        if self.learning_rate < 0:
            raise ValueError("The learning rate cannot be negative (got {}).".format(self.learning_rate))

        elif self.radius < 0:
            raise ValueError("The window radius has to be non-negative (got {}).".format(self.radius))

        elif self.stride_fraction > 1:
            raise ValueError("The stride fraction has to lie in (0, 1] (got {}).".format(self.stride_fraction))

        elif not 0 <= self.validation_fraction < 1:
            raise ValueError("The validation fraction has to lie in [0, 1) (got {}).".format(
                self.validation_fraction
            ))

    @property
    def grouping(self) -> DistortionGrouping:
        return DistortionGrouping(groups=self.qp_groups, sigma=self.sigma)

    @property
    def qps(self) -> Tuple[int, ...]:
        return self.grouping.qps

    def model_config(self, **overrides) -> ModelConfig:
        """
        A model configuration agreeing with this run on R, k and the seed.

        :param overrides: any further `ModelConfig` fields
        :return: the model configuration
        """

        fields = {"radius": self.radius, "neighbours": self.neighbours, "seed": self.seed}
        fields.update(overrides)
        return ModelConfig(**fields)


@attr.s(frozen=True)
class RunManifest(object):
    """
    The record written next to the outputs of every command.
    """

    command: str = attr.ib(validator=attr.validators.instance_of(str))
    config_path: Optional[str] = attr.ib()
    seed: int = attr.ib(converter=int)
    inputs: List[str] = attr.ib(converter=list, hash=False)
    outputs: List[str] = attr.ib(converter=list, hash=False)
    version: str = attr.ib(validator=attr.validators.instance_of(str))
    wall_clock_seconds: float = attr.ib(converter=float)
    arguments: List[str] = attr.ib(converter=list, factory=list, hash=False)


def load_config(path: str) -> Tuple[TrainingConfig, ModelConfig]:
    """
    Reads a JSON configuration file. Top-level keys are `TrainingConfig` fields; an optional
    `model` object holds `ModelConfig` fields.

    :param path: the configuration file
    :return: the training and model configurations
    :raises: :any:`ValueError` on unknown keys
    """

    with open(path, "r") as fh:
        raw = json.load(fh)

    model_fields = raw.pop("model", {})
    _check_keys(raw, TrainingConfig)
    _check_keys(model_fields, ModelConfig)
    training = cattr.structure(raw, TrainingConfig)
    return training, training.model_config(**model_fields)


def _check_keys(raw: Dict, cls: type) -> None:
    """
    Rejects configuration keys that are not fields of a class.

    :param raw: the raw key-value mapping
    :param cls: the `attrs` class the keys belong to
    :raises: :any:`ValueError`
    """

    unknown = set(raw.keys()) - set(field.name for field in attr.fields(cls))

    if len(unknown) > 0:
        raise ValueError("Unknown {cls} keys: {keys}.".format(cls=cls.__name__, keys=sorted(unknown)))


def save_json(obj, path: str) -> None:
    """
    Serialises an `attrs` object to a JSON file.

    :param obj: the object
    :param path: the output file
    """

    with open(path, "w") as fh:
        json.dump(cattr.unstructure(obj), fh, indent=2, sort_keys=True)


def load_json(path: str, cls: type):
    """
    Reads an `attrs` object back from a JSON file written by :func:`save_json`.

    :param path: the input file
    :param cls: the `attrs` class
    :return: the object
    """

    with open(path, "r") as fh:
        return cattr.structure(json.load(fh), cls)
