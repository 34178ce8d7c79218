# -*- coding: utf-8 -*-
"""
The two training stages. The quality estimator is trained first against soft distortion
labels; the enhancement model is trained next with the quality estimator frozen.
Both trainers follow the `sklearn` estimator convention: configuration in the constructor,
learnt state in attributes with a trailing underscore after `fit`.
"""

import math
import time
import logging
import numpy as np
import pandas as pd
import torch

from typing import List, Optional, Sequence
from sklearn.base import BaseEstimator
from pybqe.data_models.config import ModelConfig, TrainingConfig
from pybqe.data_models.training import EpochRecord, TrainingSample
from pybqe.enhancement.inference import geometry_tensor, neighbor_tensors, window_tensor
from pybqe.metrics.quality import delta_psnr
from pybqe.networks.checkpoint import parameter_checksum
from pybqe.networks.layers import torch_session
from pybqe.networks.model import BqeModel, QualityEstimator
from pybqe.training.objectives import bqe_loss, qe_loss, soft_label

logger = logging.getLogger(__name__)


class _StageTrainer(BaseEstimator):
    """
    The optimisation loop shared by both stages: seeded shuffling, mini-batches averaging
    per-sample losses, Adam, optional gradient clipping and a step cap.
    """

    stage = None

    def __init__(self, config: TrainingConfig = None, model_config: ModelConfig = None):
        """
        :param config: the run configuration; defaults apply when absent
        :param model_config: the architecture; derived from `config` when absent
        """

        self.config = config
        self.model_config = model_config

    def _configs(self):
        config = self.config if self.config is not None else TrainingConfig()
        model_config = self.model_config if self.model_config is not None else config.model_config()
        return config, model_config

    def _build_model(self, model_config: ModelConfig) -> torch.nn.Module:
        raise NotImplementedError

    def _sample_loss(self, model: torch.nn.Module, sample: TrainingSample) -> torch.Tensor:
        raise NotImplementedError

    def fit(self, dataset: Sequence[TrainingSample], *args, **kwargs):
        """
        Trains a fresh model on the samples. Seeding, the 64-bit default dtype and the
        deterministic-algorithms flag only apply for the duration of the call.

        :param dataset: the training samples
        :return: the fitted trainer, with `model_`, `history_` and `steps_` set
        :raises: :any:`ValueError` for an empty dataset, :any:`FloatingPointError` on a
                 non-finite loss
        """

        if len(dataset) == 0:
            raise ValueError("Cannot train on an empty dataset.")

        config, model_config = self._configs()

        with torch_session(config.seed, config.deterministic):
            self._optimise(dataset, config, model_config)

        return self

    def _planned_steps(self, n_samples: int, config: TrainingConfig) -> int:
        steps = config.epochs * int(math.ceil(n_samples / float(config.batch_size)))
        return steps if config.max_steps is None else min(steps, config.max_steps)

    def _optimise(self, dataset: Sequence[TrainingSample], config: TrainingConfig, model_config: ModelConfig) -> None:
        model = self._build_model(model_config)
        model.train()
        parameters = [parameter for parameter in model.parameters() if parameter.requires_grad]
        optimizer = torch.optim.Adam(parameters, lr=config.learning_rate)
        scheduler = None

        if config.lr_schedule == "cosine":
            scheduler = torch.optim.lr_scheduler.CosineAnnealingLR(
                optimizer,
                T_max=self._planned_steps(len(dataset), config)
            )

        rng = np.random.default_rng(config.seed)
        history = []
        steps = 0

        for epoch in range(1, config.epochs + 1):
            started = time.perf_counter()
            order = rng.permutation(len(dataset))
            losses = []

            for start in range(0, len(order), config.batch_size):
                batch = [dataset[position] for position in order[start:start + config.batch_size]]
                optimizer.zero_grad()
                loss = torch.stack([self._sample_loss(model, sample) for sample in batch]).mean()

                if not torch.isfinite(loss):
                    raise FloatingPointError(
                        "Non-finite {stage} loss at epoch {epoch}, step {step} (QPs {qps}).".format(
                            stage=self.stage,
                            epoch=epoch,
                            step=steps + 1,
                            qps=sorted(set(sample.qp for sample in batch))
                        )
                    )

                loss.backward()

                if config.grad_clip is not None:
                    torch.nn.utils.clip_grad_norm_(parameters, config.grad_clip)

                optimizer.step()

                if scheduler is not None:
                    scheduler.step()

                losses.append(float(loss.detach()))
                steps += 1

                if config.max_steps is not None and steps >= config.max_steps:
                    break

            record = EpochRecord(
                epoch=epoch,
                stage=self.stage,
                loss=float(np.mean(losses)),
                seconds=time.perf_counter() - started
            )
            history.append(record)
            logger.info("Stage %s, epoch %d: loss %.6f (%.1f s).", record.stage, epoch, record.loss, record.seconds)

            if config.max_steps is not None and steps >= config.max_steps:
                break

        model.eval()
        self.model_ = model
        self.history_ = history
        self.steps_ = steps


class QeTrainer(_StageTrainer):
    """
    Trains the quality estimator against Gaussian soft labels of the sample QPs.
    """

    stage = "qe"

    def _build_model(self, model_config: ModelConfig) -> QualityEstimator:
        return QualityEstimator(model_config)

    def _sample_loss(self, model: QualityEstimator, sample: TrainingSample) -> torch.Tensor:
        index, distances = neighbor_tensors(sample.neighbors)
        target = sample.window.target
        quality = model(torch.as_tensor(target.attributes), geometry_tensor(target), index, distances)
        return qe_loss(quality, soft_label(sample.qp, self._grouping))

    def fit(self, dataset: Sequence[TrainingSample], *args, **kwargs):
        config, _ = self._configs()
        self._grouping = config.grouping
        levels = set(self._grouping.level_of(sample.qp) for sample in dataset)

        if len(levels) < 2:
            logger.warning(
                "The quality estimation dataset covers a single distortion level; the estimator "
                "can only learn a constant label."
            )

        return super().fit(dataset, *args, **kwargs)


class BqeTrainer(_StageTrainer):
    """
    Trains the enhancement model with a frozen, pre-trained quality estimator.
    """

    stage = "bqe"

    def __init__(
            self,
            config: TrainingConfig = None,
            model_config: ModelConfig = None,
            quality_estimator: Optional[QualityEstimator] = None
    ):
        """
        :param config: the run configuration
        :param model_config: the architecture
        :param quality_estimator: the pre-trained estimator; required unless the architecture
                                  has none
        """

        super().__init__(config, model_config)
        self.quality_estimator = quality_estimator

    def _build_model(self, model_config: ModelConfig) -> BqeModel:
        model = BqeModel(model_config)

        if model.quality_estimator is not None:

            if self.quality_estimator is None:
                raise ValueError("Stage two needs a pre-trained quality estimator unless the `no-qe` ablation is used.")

            model.quality_estimator.load_state_dict(self.quality_estimator.state_dict())

            for parameter in model.quality_estimator.parameters():
                parameter.requires_grad_(False)

            self.qe_checksum_ = parameter_checksum(model.quality_estimator)

        return model

    def _sample_loss(self, model: BqeModel, sample: TrainingSample) -> torch.Tensor:
        index, distances = neighbor_tensors(sample.neighbors)
        enhanced, _ = model(window_tensor(sample.window), geometry_tensor(sample.window.target), index, distances)
        return bqe_loss(enhanced, torch.as_tensor(sample.original))

    def fit(self, dataset: Sequence[TrainingSample], *args, **kwargs):
        super().fit(dataset, *args, **kwargs)

        if self.model_.quality_estimator is not None:
            self.model_.quality_estimator.eval()

            if parameter_checksum(self.model_.quality_estimator) != self.qe_checksum_:
                raise RuntimeError("The frozen quality estimator changed during training.")

        return self


def train_qe(
        dataset: Sequence[TrainingSample],
        config: TrainingConfig,
        model_config: ModelConfig = None
) -> QualityEstimator:
    """
    Stage one: trains the quality estimator.

    :param dataset: the training samples, spanning several distortion levels
    :param config: the run configuration
    :param model_config: the architecture; derived from `config` when absent
    :return: the trained estimator
    """

    return QeTrainer(config, model_config).fit(dataset).model_


def train_bqe(
        dataset: Sequence[TrainingSample],
        quality_estimator: Optional[QualityEstimator],
        config: TrainingConfig,
        model_config: ModelConfig = None
) -> BqeModel:
    """
    Stage two: trains the enhancement model around a frozen quality estimator.

    :param dataset: the training samples
    :param quality_estimator: the stage one result; `None` only for the `no-qe` ablation
    :param config: the run configuration
    :param model_config: the architecture; derived from `config` when absent
    :return: the trained model
    """

    return BqeTrainer(config, model_config, quality_estimator).fit(dataset).model_


def evaluate_qe_accuracy(model: QualityEstimator, dataset: Sequence[TrainingSample], config: TrainingConfig) -> float:
    """
    The share of samples whose most probable distortion level is the level of their QP.

    :param model: the quality estimator
    :param dataset: the samples
    :param config: the run configuration holding the QP grouping
    :return: the accuracy in [0, 1]
    """

    if len(dataset) == 0:
        raise ValueError("Cannot evaluate on an empty dataset.")

    grouping = config.grouping
    hits = 0

    with torch.no_grad():

        for sample in dataset:
            index, distances = neighbor_tensors(sample.neighbors)
            target = sample.window.target
            quality = model(torch.as_tensor(target.attributes), geometry_tensor(target), index, distances)
            hits += int(int(torch.argmax(quality)) == grouping.level_of(sample.qp))

    return hits / len(dataset)


def evaluate_enhancement_gain(model: BqeModel, dataset: Sequence[TrainingSample]) -> float:
    """
    The PSNR gain of the enhanced over the decoded target attributes, with the squared errors
    pooled over every point of every sample.

    :param model: the enhancement model
    :param dataset: the samples
    :return: the gain in dB
    """

    if len(dataset) == 0:
        raise ValueError("Cannot evaluate on an empty dataset.")

    enhanced, decoded, original = [], [], []

    with torch.no_grad():

        for sample in dataset:
            index, distances = neighbor_tensors(sample.neighbors)
            output, _ = model(window_tensor(sample.window), geometry_tensor(sample.window.target), index, distances)
            enhanced.append(output.numpy())
            decoded.append(sample.window.target.attributes)
            original.append(sample.original)

    return delta_psnr(np.concatenate(enhanced), np.concatenate(decoded), np.concatenate(original))


def write_training_log(history: List[EpochRecord], path: str) -> None:
    """
    Writes the per-epoch records as CSV with the columns epoch, stage, loss, seconds.

    :param history: the records of one or more stages
    :param path: the output file
    """

    table = pd.DataFrame(
        [[record.epoch, record.stage, record.loss, record.seconds] for record in history],
        columns=["epoch", "stage", "loss", "seconds"]
    )
    table.to_csv(path, index=False)
