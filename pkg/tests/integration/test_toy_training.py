# -*- coding: utf-8 -*-
"""
Both training stages on synthetic sequences. The small runs always execute; the full-size
runs (5 frames of 512 points) take minutes and are skipped unless PYBQE_RUN_SLOW=1.
"""

import unittest
import torch

from pybqe.data_models.config import ModelConfig
from pybqe.enhancement.inference import geometry_tensor, neighbor_tensors, window_tensor
from pybqe.networks.model import BqeModel, QualityEstimator
from pybqe.point_cloud.toy import make_toy_sequence
from pybqe.training.dataset import build_dataset
from pybqe.training.objectives import bqe_loss
from pybqe.training.trainer import BqeTrainer, QeTrainer, evaluate_enhancement_gain, evaluate_qe_accuracy
from tests.helpers import RUN_SLOW, small_model_config, small_training_config

QPS = (51, 40, 22)


def _dataset_loss(model: BqeModel, dataset) -> float:

    with torch.no_grad():
        losses = []

        for sample in dataset:
            index, distances = neighbor_tensors(sample.neighbors)
            enhanced, _ = model(window_tensor(sample.window), geometry_tensor(sample.window.target), index, distances)
            losses.append(float(bqe_loss(enhanced, torch.as_tensor(sample.original))))

    return sum(losses) / len(losses)


class SmallQualityEstimationTests(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.config = small_training_config(
            epochs=40,
            batch_size=4,
            learning_rate=1e-2,
            neighbours=8,
            patch_size=256
        )
        sequence = make_toy_sequence(n_frames=6, n_points=256, seed=0)
        cls.training = build_dataset([sequence[:4]], QPS, cls.config, component="y")
        cls.held_out = build_dataset([sequence[4:]], QPS, cls.config, component="y")
        cls.estimator = QeTrainer(cls.config, small_model_config(neighbours=8)).fit(cls.training).model_

    def test_levels_are_recognised_on_held_out_frames(self):
        self.assertEqual(len(self.held_out), 6)
        self.assertGreaterEqual(evaluate_qe_accuracy(self.estimator, self.held_out, self.config), 0.9)

    def test_training_frames_are_recognised(self):
        self.assertGreaterEqual(evaluate_qe_accuracy(self.estimator, self.training, self.config), 0.9)


class SinglePatchOverfitTests(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.config = small_training_config(
            epochs=200,
            batch_size=1,
            learning_rate=3e-3,
            lr_schedule="cosine",
            neighbours=8,
            patch_size=128,
            max_steps=200
        )
        cls.model_config = small_model_config(neighbours=8, zero_init_head=False)
        sequence = make_toy_sequence(n_frames=3, n_points=128, seed=0)
        samples = build_dataset([sequence], (51,), cls.config, component="y")
        cls.patch = [sample for sample in samples if sample.window.target.frame_index == 1]

    def test_loss_falls_below_a_tenth(self):
        self.assertEqual(len(self.patch), 1)
        initial = _dataset_loss(BqeModel(self.model_config), self.patch)
        trainer = BqeTrainer(self.config, self.model_config, QualityEstimator(self.model_config)).fit(self.patch)
        self.assertEqual(trainer.steps_, 200)
        self.assertLess(_dataset_loss(trainer.model_, self.patch), 0.1 * initial)


@unittest.skipUnless(RUN_SLOW, "set PYBQE_RUN_SLOW=1 to run the full-size toy training")
class ToyTrainingTests(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.qe_config = small_training_config(
            epochs=30,
            batch_size=5,
            learning_rate=1e-2,
            radius=2,
            neighbours=20,
            patch_size=512
        )
        cls.bqe_config = small_training_config(
            epochs=40,
            batch_size=3,
            learning_rate=3e-3,
            lr_schedule="cosine",
            radius=2,
            neighbours=20,
            patch_size=512,
            max_steps=200
        )
        cls.model_config = ModelConfig(radius=2, neighbours=20)
        sequence = make_toy_sequence(n_frames=7, n_points=512, seed=0)
        cls.dataset = build_dataset([sequence[:5]], QPS, cls.bqe_config, component="y")
        cls.held_out = build_dataset([sequence[5:]], QPS, cls.bqe_config, component="y")
        cls.estimator = QeTrainer(cls.qe_config, cls.model_config).fit(cls.dataset).model_

    def test_estimator_recognises_held_out_frames(self):
        self.assertEqual(len(self.held_out), 6)
        self.assertGreaterEqual(evaluate_qe_accuracy(self.estimator, self.held_out, self.qe_config), 0.9)

    def test_enhancement_fits_the_training_sequence(self):
        self.assertEqual(len(self.dataset), 15)
        untrained = BqeModel(self.model_config)
        untrained.quality_estimator.load_state_dict(self.estimator.state_dict())
        initial = _dataset_loss(untrained, self.dataset)
        trainer = BqeTrainer(self.bqe_config, self.model_config, self.estimator).fit(self.dataset)
        self.assertLessEqual(trainer.steps_, 200)
        self.assertLess(_dataset_loss(trainer.model_, self.dataset), 0.1 * initial)
        self.assertGreater(evaluate_enhancement_gain(trainer.model_, self.dataset), 0.5)
