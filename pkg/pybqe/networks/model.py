# -*- coding: utf-8 -*-
"""
The blind quality enhancement network. A window of motion-compensated attributes is fused by
temporal cross-attention, a shared trunk of densely connected neighbourhood attention blocks
produces shallow, medium and deep branch features, and the quality estimator decides how to
mix them before the reconstruction head predicts a residual for the target attributes.
"""

import attr
import torch

from torch import nn
from typing import Optional, Sequence
from pybqe.data_models.config import ModelConfig
from pybqe.networks.attention import DenselyConnectedNA, TemporalCrossAttention, WindowMLP
from pybqe.networks.layers import default_dtype, normalize_geometry, pointwise_mlp, zero_module
from pybqe.constants import ATTRIBUTE_PEAK, NUMERIC_ACCURACY, QE_DIFFERENCE_EDGES, QE_SHARE_FLOOR


def _tensor_validator(instance, attribute, value) -> None:
    """
    Custom validator.

    :param instance: the `attrs` class instance
    :param attribute: the attribute
    :param value: the attribute value
    """

    if not isinstance(value, torch.Tensor) or value.dim() != 2:
        raise ValueError("Branch feature `{}` has to be a 2-d tensor.".format(attribute.name))


@attr.s(frozen=True, eq=False)
class BranchFeatures(object):
    """
    The features of the shallow, medium and deep branches, all n x c_f.
    """

    low: torch.Tensor = attr.ib(validator=_tensor_validator)
    medium: torch.Tensor = attr.ib(validator=_tensor_validator)
    high: torch.Tensor = attr.ib(validator=_tensor_validator)

    def __attrs_post_init__(self) -> None:
        """
        :raises: :any:`ValueError` if the branches differ in shape
        """

        shapes = {tuple(self.low.shape), tuple(self.medium.shape), tuple(self.high.shape)}

        if len(shapes) != 1:
            raise ValueError("Branch features have to share one shape (got {}).".format(sorted(shapes)))


def adaptive_fuse(branches: BranchFeatures, quality: torch.Tensor) -> torch.Tensor:
    """
    Mixes the branch features with the quality vector: p_L F_L + p_M F_M + p_H F_H.

    :param branches: the branch features
    :param quality: the 3 probabilities of low, medium and high distortion
    :return: the n x c_f fused features
    :raises: :any:`ValueError` if the weights are not a probability vector
    """

    quality = torch.as_tensor(quality, dtype=branches.low.dtype)

    if quality.shape != (3,):
        raise ValueError("The quality vector has to hold 3 entries (got shape {}).".format(tuple(quality.shape)))

    with torch.no_grad():

        if bool((quality < 0).any()) or abs(float(quality.sum()) - 1.) > NUMERIC_ACCURACY:
            raise ValueError("Fusion weights have to form a probability vector (got {}).".format(quality.tolist()))

    return quality[0] * branches.low + quality[1] * branches.medium + quality[2] * branches.high


class ProgressiveExtractor(nn.Module):
    """
    A single trunk of residual dense blocks with three taps. The shallow branch reads the trunk
    after the first `stage_depths[0]` blocks, the medium and deep branches after the further
    cumulative depths, so every deeper branch extends the shallower ones.
    """

    def __init__(self, in_width: int, config: ModelConfig):
        super().__init__()
        self.stage_depths = tuple(config.stage_depths)
        self.stem = pointwise_mlp([in_width, config.trunk_width], config.negative_slope, final_activation=True)
        self.blocks = nn.ModuleList([
            DenselyConnectedNA(
                config.trunk_width,
                config.trunk_width,
                config.growth_width,
                config.na_layers_per_block,
                config.negative_slope,
                use_positional_encoding=config.ablation != "no-pe",
                use_neighborhood=config.ablation != "no-na"
            )
            for _ in range(self.stage_depths[-1])
        ])
        self.taps = nn.ModuleList([
            pointwise_mlp([config.trunk_width, config.branch_width], config.negative_slope, final_activation=True)
            for _ in self.stage_depths
        ])

    def forward(self, features: torch.Tensor, index: torch.Tensor, distances: torch.Tensor) -> BranchFeatures:
        trunk = self.stem(features)
        tapped = []

        for depth, block in enumerate(self.blocks, start=1):
            trunk = trunk + block(trunk, index, distances)

            if depth in self.stage_depths:
                tapped.append(self.taps[len(tapped)](trunk))

        return BranchFeatures(*tapped)


def neighbour_difference_histogram(
        attributes: torch.Tensor,
        index: torch.Tensor,
        edges: Sequence[float] = QE_DIFFERENCE_EDGES
) -> torch.Tensor:
    """
    Bins the absolute attribute differences between every point and its neighbours. A coarse
    quantiser snaps nearby values onto the same few levels, so the share of exact repeats
    grows with the distortion while small non-zero differences disappear.

    :param attributes: the n x c raw attributes
    :param index: the n x k neighbour positions; the point itself is skipped
    :param edges: the increasing bin edges
    :return: the n x (c * (len(edges) + 1)) per-point bin shares, channel after channel
    """

    n, channels = attributes.shape
    differences = (attributes[index] - attributes.unsqueeze(1)).abs().detach()
    bins = torch.bucketize(differences, torch.as_tensor(edges, dtype=differences.dtype), right=True)
    counts = nn.functional.one_hot(bins, len(edges) + 1).to(attributes.dtype)
    others = (index != torch.arange(n, device=index.device).unsqueeze(1)).to(attributes.dtype)
    counts = (counts * others[:, :, None, None]).sum(dim=1)
    shares = counts / others.sum(dim=1).clamp(min=1.)[:, None, None]
    return shares.reshape(n, channels * (len(edges) + 1))


class QualityEstimator(nn.Module):
    """
    Estimates the distortion level of a frame. Every point gets learnt features from a
    densely connected neighbourhood attention stack and a histogram of its differences to
    its neighbours. Both are averaged over the frame; the histogram shares enter the fully
    connected layer on a log scale, and a softmax over the low, medium and high levels
    follows. Ablations of the enhancement path leave its architecture alone, so one
    pre-trained estimator serves every variant.
    """

    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        self.n_histogram = config.attribute_channels * (len(QE_DIFFERENCE_EDGES) + 1)

        with torch.random.fork_rng(devices=[]), default_dtype(torch.float64):
            torch.manual_seed(config.seed + 1)
            self.stem = pointwise_mlp(
                [config.attribute_channels + 3, config.qe_width],
                config.negative_slope,
                final_activation=True
            )
            self.dcna = DenselyConnectedNA(
                config.qe_width,
                config.qe_width,
                config.qe_width,
                config.qe_na_layers,
                config.negative_slope
            )
            self.pointwise = pointwise_mlp([config.qe_width, config.qe_width], config.negative_slope, final_activation=True)
            self.fc = nn.Linear(config.qe_width + self.n_histogram, 3)

        self.double()

    def features(
            self,
            attributes: torch.Tensor,
            geometry: torch.Tensor,
            index: torch.Tensor,
            distances: torch.Tensor
    ) -> torch.Tensor:
        """
        The per-point features that get pooled: the learnt features followed by the
        neighbour difference histogram.

        :param attributes: the n x c raw target attributes
        :param geometry: the n x 3 raw target geometry
        :param index: the n x k neighbour positions
        :param distances: the n x k neighbour distances
        :return: the n x (qe_width + histogram width) point features
        :raises: :any:`ValueError` for an empty frame
        """

        if attributes.shape[0] == 0:
            raise ValueError("Cannot estimate the quality of an empty frame.")

        inputs = torch.cat([attributes / ATTRIBUTE_PEAK, normalize_geometry(geometry)], dim=-1)
        learnt = self.pointwise(self.dcna(self.stem(inputs), index, distances))
        return torch.cat([learnt, neighbour_difference_histogram(attributes, index)], dim=-1)

    def classify(self, point_features: torch.Tensor) -> torch.Tensor:
        """
        Pools point features into the quality vector.

        :param point_features: the point features returned by :meth:`features`
        :return: the 3 probabilities of low, medium and high distortion
        """

        pooled = point_features.mean(dim=0)
        learnt, shares = pooled[:self.config.qe_width], pooled[self.config.qe_width:]
        logits = self.fc(torch.cat([learnt, torch.log(shares + QE_SHARE_FLOOR)]))
        return torch.softmax(logits, dim=-1)

    def forward(
            self,
            attributes: torch.Tensor,
            geometry: torch.Tensor,
            index: torch.Tensor,
            distances: torch.Tensor
    ) -> torch.Tensor:
        return self.classify(self.features(attributes, geometry, index, distances))


class BqeModel(nn.Module):
    """
    The full enhancement model for one colour component.
    """

    def __init__(self, config: ModelConfig):
        """
        :param config: the architecture; its seed fixes the parameter initialisation
        """

        super().__init__()
        self.config = config
        window_length = 2 * config.radius + 1

        with torch.random.fork_rng(devices=[]), default_dtype(torch.float64):
            torch.manual_seed(config.seed)

            if config.ablation == "no-tcca":
                self.temporal = WindowMLP(
                    window_length,
                    config.attribute_channels,
                    config.tcca_hidden_width,
                    config.tcca_width,
                    config.negative_slope
                )

            else:
                self.temporal = TemporalCrossAttention(
                    config.attribute_channels,
                    config.tcca_hidden_width,
                    config.key_width,
                    config.tcca_width,
                    config.negative_slope
                )

            self.extractor = ProgressiveExtractor(config.tcca_width + 3, config)
            self.head = nn.Linear(config.branch_width, config.attribute_channels)

        if config.zero_init_head:
            zero_module(self.head)

        self.quality_estimator = QualityEstimator(config) if config.uses_quality_estimator else None
        self.double()

    def fixed_quality(self) -> torch.Tensor:
        """
        The quality vector used without a quality estimator: all weight on the deep branch.
        """

        return torch.tensor([0., 0., 1.], dtype=self.head.weight.dtype)

    def estimate_quality(
            self,
            attributes: torch.Tensor,
            geometry: torch.Tensor,
            index: torch.Tensor,
            distances: torch.Tensor
    ) -> torch.Tensor:

        if self.quality_estimator is None:
            return self.fixed_quality()

        return self.quality_estimator(attributes, geometry, index, distances)

    def forward(
            self,
            window: torch.Tensor,
            geometry: torch.Tensor,
            index: torch.Tensor,
            distances: torch.Tensor,
            quality: Optional[torch.Tensor] = None
    ):
        """
        Enhances the target attributes of one compensated window patch.

        :param window: the (2R+1) x n x c raw window attributes, target in the centre
        :param geometry: the n x 3 raw target geometry
        :param index: the n x k neighbour positions within the patch
        :param distances: the n x k neighbour distances
        :param quality: a precomputed quality vector; estimated from the target patch if absent
        :return: the n x c enhanced target attributes and the quality vector used
        """

        if window.shape[0] != 2 * self.config.radius + 1:
            raise ValueError("The model expects windows of {want} frames, got {got}.".format(
                want=2 * self.config.radius + 1,
                got=window.shape[0]
            ))

        target = window[window.shape[0] // 2]

        if quality is None:
            quality = self.estimate_quality(target, geometry, index, distances)

        fused_window = self.temporal(window / ATTRIBUTE_PEAK, normalize_geometry(geometry))
        branches = self.extractor(fused_window, index, distances)
        residual = self.head(adaptive_fuse(branches, quality))
        return target + ATTRIBUTE_PEAK * residual, quality
