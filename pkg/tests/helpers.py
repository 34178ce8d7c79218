# -*- coding: utf-8 -*-
"""
Small fixtures shared by the test suites.
"""

import os
import numpy as np
import torch

from pybqe.data_models.config import ModelConfig, TrainingConfig
from pybqe.data_models.frame import PointCloudFrame

RUN_SLOW = os.environ.get("PYBQE_RUN_SLOW") == "1"
"""
Whether the long toy training runs are enabled.
"""


def random_geometry(n: int, seed: int = 0, extent: int = 64) -> np.ndarray:
    """
    `n` distinct random voxels in a cube of side `extent`.
    """

    rng = np.random.default_rng(seed)
    flat = rng.choice(extent ** 3, size=n, replace=False)
    return np.stack(np.unravel_index(flat, (extent, extent, extent)), axis=1).astype(np.int64)


def random_frame(n: int = 32, channels: int = 1, seed: int = 0, extent: int = 64, frame_index: int = 0) -> PointCloudFrame:
    rng = np.random.default_rng(seed + 1000)
    return PointCloudFrame(
        geometry=random_geometry(n, seed, extent),
        attributes=rng.integers(0, 256, size=(n, channels)).astype(np.float64),
        frame_index=frame_index
    )


def distinct_distance_geometry(n: int, seed: int = 0) -> np.ndarray:
    """
    Random voxels in a large cube whose pairwise distances are all distinct, so that nearest
    neighbour sets do not depend on tie-breaking.
    """

    while True:
        geometry = random_geometry(n, seed, extent=4096)
        squared = ((geometry[:, None, :] - geometry[None, :, :]) ** 2).sum(axis=-1)
        upper = squared[np.triu_indices(n, k=1)]

        if np.unique(upper).shape[0] == upper.shape[0]:
            return geometry

        seed += 1


def small_model_config(**overrides) -> ModelConfig:
    """
    A narrow architecture for fast tests. Its head starts at zero, so the untrained model is the
    identity unless `zero_init_head=False` is passed.
    """

    fields = dict(
        radius=1,
        neighbours=4,
        tcca_hidden_width=8,
        key_width=8,
        tcca_width=4,
        trunk_width=8,
        branch_width=8,
        growth_width=4,
        na_layers_per_block=1,
        qe_width=8,
        qe_na_layers=1,
        zero_init_head=True
    )
    fields.update(overrides)
    return ModelConfig(**fields)


def small_training_config(**overrides) -> TrainingConfig:
    fields = dict(
        epochs=1,
        batch_size=2,
        learning_rate=1e-3,
        radius=1,
        neighbours=4,
        patch_size=64
    )
    fields.update(overrides)
    return TrainingConfig(**fields)


def model_inputs(n: int = 16, radius: int = 1, k: int = 4, seed: int = 0):
    """
    Random window attributes, geometry and a brute-force neighbour index for a model forward.
    """

    from pybqe.point_cloud.neighborhood import knn

    rng = np.random.default_rng(seed)
    geometry = random_geometry(n, seed)
    neighbors = knn(geometry, geometry, k)
    return (
        torch.as_tensor(rng.uniform(0., 255., size=(2 * radius + 1, n, 1))),
        torch.as_tensor(geometry, dtype=torch.float64),
        torch.as_tensor(neighbors.indices, dtype=torch.long),
        torch.as_tensor(neighbors.distances)
    )
