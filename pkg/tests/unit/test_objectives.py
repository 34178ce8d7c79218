# -*- coding: utf-8 -*-
"""
Tests of the soft labels and both training losses.
"""

import math
import unittest
import numpy as np
import torch

from torch.autograd import gradcheck
from pybqe.data_models.quality import DistortionGrouping, QualityVector
from pybqe.training.objectives import bqe_loss, entropy, qe_loss, qp_centers, soft_label
from pybqe.constants import MODIFIED_QP_GROUPS


class SoftLabelTests(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.grouping = DistortionGrouping()

    def test_centres(self):
        self.assertEqual(qp_centers(self.grouping), (25., 37., 48.5))
        self.assertEqual(qp_centers(DistortionGrouping(groups=MODIFIED_QP_GROUPS)), (28., 40., 51.5))

    def test_highest_qp(self):
        label = soft_label(51, self.grouping)
        self.assertAlmostEqual(label.low, 1.5e-6, delta=5e-7)
        self.assertAlmostEqual(label.medium, 0.0221, delta=5e-4)
        self.assertAlmostEqual(label.high, 0.9779, delta=5e-4)
        self.assertGreater(label.high, label.medium)

    def test_midpoint_between_centres_is_a_tie(self):
        label = soft_label(42.75, self.grouping)
        self.assertAlmostEqual(label.medium, label.high, places=12)
        self.assertLess(label.low, label.medium)

    def test_labels_peak_at_their_centre(self):

        for position, centre in enumerate(self.grouping.centers):
            with self.subTest(centre=centre):
                self.assertEqual(int(np.argmax(soft_label(centre, self.grouping).as_array())), position)

    def test_every_label_is_a_distribution(self):

        for qp in list(self.grouping.qps) + [0, 10, 63, 100]:
            with self.subTest(qp=qp):
                values = soft_label(qp, self.grouping).as_array()
                self.assertAlmostEqual(values.sum(), 1., places=12)
                self.assertTrue(np.all(values >= 0))

    def test_sharper_kernel_gives_sharper_labels(self):
        wide = soft_label(40, DistortionGrouping(sigma=10.))
        narrow = soft_label(40, DistortionGrouping(sigma=2.))
        self.assertLess(entropy(narrow), entropy(wide))


class QeLossTests(unittest.TestCase):

    def test_one_hot_label(self):
        loss = qe_loss(torch.tensor([0.1, 0.2, 0.7], dtype=torch.float64), np.array([0., 0., 1.]))
        self.assertAlmostEqual(float(loss), -math.log(0.7), places=12)
        self.assertAlmostEqual(float(loss), 0.35667, places=5)

    def test_matching_prediction_reaches_the_entropy(self):
        label = soft_label(40, DistortionGrouping())
        self.assertAlmostEqual(float(qe_loss(label.as_array(), label)), entropy(label), places=12)

    def test_entropy_is_a_lower_bound(self):
        label = soft_label(34, DistortionGrouping())
        rng = np.random.default_rng(0)

        for _ in range(20):
            quality = QualityVector.from_array(rng.dirichlet(np.ones(3)))
            self.assertGreaterEqual(float(qe_loss(quality, label)), entropy(label) - 1e-12)

    def test_zero_probabilities_are_clamped(self):
        loss = qe_loss(np.array([1., 0., 0.]), np.array([0., 0., 1.]))
        self.assertTrue(math.isfinite(float(loss)))
        self.assertAlmostEqual(float(loss), -math.log(1e-12), places=6)

    def test_shapes_have_to_agree(self):

        with self.assertRaises(ValueError):
            qe_loss(np.array([0.5, 0.5]), np.array([0., 0., 1.]))

    def test_gradients(self):
        label = torch.as_tensor(soft_label(46, DistortionGrouping()).as_array())
        quality = torch.tensor([0.2, 0.3, 0.5], dtype=torch.float64, requires_grad=True)
        self.assertTrue(gradcheck(lambda p: qe_loss(p, label), (quality,), eps=1e-6))
        loss = qe_loss(quality, label)
        loss.backward()
        np.testing.assert_allclose(quality.grad.numpy(), -label.numpy() / quality.detach().numpy())


class BqeLossTests(unittest.TestCase):

    def test_constant_difference(self):
        original = np.random.default_rng(1).uniform(0., 255., size=(50, 1))
        self.assertAlmostEqual(float(bqe_loss(original + 3., original)), 9., places=9)

    def test_channels_are_summed(self):
        self.assertAlmostEqual(float(bqe_loss(np.full((4, 3), 2.), np.zeros((4, 3)))), 12., places=12)

    def test_identical_attributes(self):
        original = np.random.default_rng(2).uniform(0., 255., size=(10, 1))
        self.assertEqual(float(bqe_loss(original, original)), 0.)

    def test_invalid_inputs(self):

        with self.assertRaises(ValueError):
            bqe_loss(np.zeros((4, 1)), np.zeros((5, 1)))

        with self.assertRaises(ValueError):
            bqe_loss(np.zeros((0, 1)), np.zeros((0, 1)))

    def test_gradients(self):
        original = torch.as_tensor(np.random.default_rng(3).uniform(0., 255., size=(6, 1)))
        enhanced = torch.as_tensor(np.random.default_rng(4).uniform(0., 255., size=(6, 1))).requires_grad_(True)
        self.assertTrue(gradcheck(lambda e: bqe_loss(e, original), (enhanced,), eps=1e-6))
