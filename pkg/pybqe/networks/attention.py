# -*- coding: utf-8 -*-
"""
The learned building blocks: temporal cross-attention over a motion-compensated window,
neighbourhood attention over k nearest neighbours, and densely connected stacks of the latter.
All modules work on one patch at a time, with points along the first axis.
"""

import math
import torch

from torch import nn
from pybqe.networks.layers import pointwise_mlp
from pybqe.constants import LEAKY_RELU_SLOPE


def _check_window(window: torch.Tensor, geometry: torch.Tensor, channels: int) -> None:
    """
    :raises: :any:`ValueError` if the window and geometry do not describe the same points
    """

    if window.dim() != 3:
        raise ValueError("A window tensor has to be frames x points x channels (got {}).".format(tuple(window.shape)))

    elif window.shape[2] != channels:
        raise ValueError("Expected {want} attribute channels, got {got}.".format(want=channels, got=window.shape[2]))

    elif geometry.shape != (window.shape[1], 3):
        raise ValueError("Geometry of shape {geom} does not match {n} points in every frame.".format(
            geom=tuple(geometry.shape),
            n=window.shape[1]
        ))


class TemporalCrossAttention(nn.Module):
    """
    Cross-attention where the target frame attributes form the queries and all window frames,
    stacked along the token axis, form the keys and values. The attention output is projected,
    added to the target attributes and concatenated with the target geometry.
    """

    def __init__(
            self,
            attribute_channels: int = 1,
            hidden_width: int = 32,
            key_width: int = 64,
            out_width: int = 16,
            negative_slope: float = LEAKY_RELU_SLOPE
    ):
        """
        :param attribute_channels: the number of attribute channels per frame
        :param hidden_width: the width of the hidden projection layers
        :param key_width: the query/key/value embedding width d_k
        :param out_width: the width of the output projection; a multiple of the channel count
        :param negative_slope: the LeakyReLU negative slope
        """

        super().__init__()

        if out_width % attribute_channels != 0:
            raise ValueError("The output width {out} is not a multiple of {channels} channels.".format(
                out=out_width,
                channels=attribute_channels
            ))

        self.attribute_channels = attribute_channels
        self.key_width = key_width
        self.out_width = out_width
        widths = [attribute_channels, hidden_width, hidden_width, key_width]
        self.proj_q = pointwise_mlp(widths, negative_slope)
        self.proj_k = pointwise_mlp(widths, negative_slope)
        self.proj_v = pointwise_mlp(widths, negative_slope)
        self.proj_o = nn.Linear(key_width, out_width)

    def attention(self, window: torch.Tensor) -> torch.Tensor:
        """
        The attention weights of every target point over all (2R+1) * n window tokens.

        :param window: the (2R+1) x n x c attributes, target in the centre
        :return: the n x (2R+1)n row-stochastic weights
        """

        target = window[window.shape[0] // 2]
        queries = self.proj_q(target)
        keys = self.proj_k(window.reshape(-1, window.shape[2]))
        return torch.softmax(queries @ keys.T / math.sqrt(self.key_width), dim=-1)

    def forward(self, window: torch.Tensor, geometry: torch.Tensor) -> torch.Tensor:
        """
        :param window: the (2R+1) x n x c motion-compensated attributes
        :param geometry: the n x 3 target geometry
        :return: the n x (out_width + 3) fused features
        """

        _check_window(window, geometry, self.attribute_channels)
        target = window[window.shape[0] // 2]
        values = self.proj_v(window.reshape(-1, window.shape[2]))
        fused = self.proj_o(self.attention(window) @ values)
        skip = target.repeat(1, self.out_width // self.attribute_channels)
        return torch.cat([fused + skip, geometry], dim=-1)


class WindowMLP(nn.Module):
    """
    The attention-free stand-in for :class:`TemporalCrossAttention`: a three-layer pointwise
    MLP over the window attributes concatenated along the channel axis.
    """

    def __init__(
            self,
            window_length: int,
            attribute_channels: int = 1,
            hidden_width: int = 32,
            out_width: int = 16,
            negative_slope: float = LEAKY_RELU_SLOPE
    ):
        super().__init__()
        self.attribute_channels = attribute_channels
        self.out_width = out_width
        self.mlp = pointwise_mlp(
            [window_length * attribute_channels, hidden_width, hidden_width, out_width],
            negative_slope
        )

    def forward(self, window: torch.Tensor, geometry: torch.Tensor) -> torch.Tensor:
        _check_window(window, geometry, self.attribute_channels)
        target = window[window.shape[0] // 2]
        stacked = window.permute(1, 0, 2).reshape(window.shape[1], -1)
        skip = target.repeat(1, self.out_width // self.attribute_channels)
        return torch.cat([self.mlp(stacked) + skip, geometry], dim=-1)


class NeighborhoodAttention(nn.Module):
    """
    Neighbourhood attention. Every point is paired with each of its k neighbours by feature
    concatenation; two pointwise layers transform the pairs, an encoding of the neighbour
    distance is added, and a softmax over the neighbours weights the transformed pairs into
    one output feature per point.
    """

    def __init__(
            self,
            in_width: int,
            out_width: int,
            negative_slope: float = LEAKY_RELU_SLOPE,
            use_positional_encoding: bool = True
    ):
        """
        :param in_width: the input feature width c
        :param out_width: the output feature width c1
        :param negative_slope: the LeakyReLU negative slope
        :param use_positional_encoding: whether neighbour distances enter the attention
        """

        super().__init__()
        self.in_width = in_width
        self.out_width = out_width
        self.transform = pointwise_mlp([2 * in_width, out_width, out_width], negative_slope, final_activation=True)
        self.position = nn.Linear(1, out_width) if use_positional_encoding else None

    def composite(self, features: torch.Tensor, index: torch.Tensor) -> torch.Tensor:
        """
        Pairs every point with its neighbours.

        :param features: the n x c point features
        :param index: the n x k neighbour positions
        :return: the n x k x 2c concatenation of centre and neighbour features
        """

        if features.shape[1] != self.in_width:
            raise ValueError("Expected {want} input channels, got {got}.".format(want=self.in_width, got=features.shape[1]))

        elif index.shape[0] != features.shape[0]:
            raise ValueError("The neighbour index has {rows} rows for {n} points.".format(
                rows=index.shape[0],
                n=features.shape[0]
            ))

        elif index.numel() > 0 and (int(index.min()) < 0 or int(index.max()) >= features.shape[0]):
            raise ValueError("Neighbour indices have to lie in [0, {}).".format(features.shape[0]))

        centre = features.unsqueeze(1).expand(-1, index.shape[1], -1)
        return torch.cat([centre, features[index]], dim=-1)

    def attention_weights(self, features: torch.Tensor, index: torch.Tensor, distances: torch.Tensor):
        """
        :param features: the n x c point features
        :param index: the n x k neighbour positions
        :param distances: the n x k neighbour distances
        :return: the n x k x c1 weights, summing to one over the neighbours, and the
                 n x k x c1 transformed pairs they weight
        """

        transformed = self.transform(self.composite(features, index))
        logits = transformed

        if self.position is not None:
            logits = logits + self.position(distances.unsqueeze(-1))

        return torch.softmax(logits, dim=1), transformed

    def forward(self, features: torch.Tensor, index: torch.Tensor, distances: torch.Tensor) -> torch.Tensor:
        """
        :param features: the n x c point features
        :param index: the n x k neighbour positions
        :param distances: the n x k neighbour distances
        :return: the n x c1 aggregated features
        """

        weights, transformed = self.attention_weights(features, index, distances)
        return (weights * transformed).sum(dim=1)


class PointwiseBlock(nn.Module):
    """
    The neighbourhood-free stand-in for :class:`NeighborhoodAttention`.
    """

    def __init__(self, in_width: int, out_width: int, negative_slope: float = LEAKY_RELU_SLOPE):
        super().__init__()
        self.in_width = in_width
        self.out_width = out_width
        self.mlp = pointwise_mlp([in_width, out_width, out_width], negative_slope, final_activation=True)

    def forward(self, features: torch.Tensor, index: torch.Tensor, distances: torch.Tensor) -> torch.Tensor:
        return self.mlp(features)


class DenselyConnectedNA(nn.Module):
    """
    A densely connected stack: every layer reads the concatenation of the block input and
    the outputs of all earlier layers, and a pointwise transition maps the full concatenation
    to the block output width.
    """

    def __init__(
            self,
            in_width: int,
            out_width: int,
            growth_width: int,
            n_layers: int,
            negative_slope: float = LEAKY_RELU_SLOPE,
            use_positional_encoding: bool = True,
            use_neighborhood: bool = True
    ):
        """
        :param in_width: the block input width
        :param out_width: the block output width
        :param growth_width: the output width of every inner layer
        :param n_layers: the number of inner layers
        :param negative_slope: the LeakyReLU negative slope
        :param use_positional_encoding: whether inner attention layers encode distances
        :param use_neighborhood: `False` replaces attention layers by pointwise MLPs
        """

        super().__init__()
        self.in_width = in_width
        self.out_width = out_width
        layers = []

        for position in range(n_layers):
            width = in_width + position * growth_width

            if use_neighborhood:
                layers.append(NeighborhoodAttention(width, growth_width, negative_slope, use_positional_encoding))

            else:
                layers.append(PointwiseBlock(width, growth_width, negative_slope))

        self.layers = nn.ModuleList(layers)
        self.transition = pointwise_mlp(
            [in_width + n_layers * growth_width, out_width],
            negative_slope,
            final_activation=True
        )

    def forward(self, features: torch.Tensor, index: torch.Tensor, distances: torch.Tensor) -> torch.Tensor:

        if features.shape[1] != self.in_width:
            raise ValueError("Dense block expects {want} input channels, got {got}.".format(
                want=self.in_width,
                got=features.shape[1]
            ))

        collected = [features]

        for layer in self.layers:
            collected.append(layer(torch.cat(collected, dim=-1), index, distances))

        return self.transition(torch.cat(collected, dim=-1))
