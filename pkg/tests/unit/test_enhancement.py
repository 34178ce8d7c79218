# -*- coding: utf-8 -*-
"""
Tests of frame-level inference and of the sequence transformers.
"""

import unittest
import numpy as np
import torch

from pybqe.data_models.frame import TemporalWindow
from pybqe.enhancement.inference import bqe_forward, enhance_sequence, qe_forward, window_tensor
from pybqe.enhancement.transformers import ColorSpaceTransformer, SequenceEnhancer
from pybqe.enhancement.validator import SequenceValidator
from pybqe.networks.model import BqeModel
from pybqe.point_cloud.color import extract_component
from pybqe.point_cloud.neighborhood import knn
from pybqe.point_cloud.toy import make_toy_sequence
from pybqe.point_cloud.window import make_window
from tests.helpers import random_frame, small_model_config


class InferenceTests(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.rgb = make_toy_sequence(n_frames=4, n_points=80, seed=3)
        cls.luma = [extract_component(frame, "y") for frame in cls.rgb]
        cls.identity = BqeModel(small_model_config())
        cls.model = BqeModel(small_model_config(zero_init_head=False))

    def test_untrained_model_is_the_identity(self):
        enhanced = bqe_forward(make_window(self.luma, 1, 1), self.identity, patch_size=128)
        np.testing.assert_array_equal(enhanced.attributes, self.luma[1].attributes)
        np.testing.assert_array_equal(enhanced.geometry, self.luma[1].geometry)
        self.assertEqual(enhanced.frame_index, 1)

    def test_identity_survives_overlapping_patches(self):
        frame = random_frame(120, seed=4)
        window = TemporalWindow(frames=[frame] * 3, radius=1)
        enhanced = bqe_forward(window, self.identity, patch_size=40, stride_fraction=0.5)
        np.testing.assert_array_equal(enhanced.attributes, frame.attributes)

    def test_geometry_is_copied_unchanged(self):
        enhanced = bqe_forward(make_window(self.luma, 2, 1), self.model, patch_size=32)
        np.testing.assert_array_equal(enhanced.geometry, self.luma[2].geometry)
        self.assertEqual(enhanced.attributes.shape, (80, 1))
        self.assertFalse(np.array_equal(enhanced.attributes, self.luma[2].attributes))

    def test_single_patch_matches_a_direct_forward(self):
        window = make_window(self.luma, 1, 1)
        enhanced = bqe_forward(window, self.model, patch_size=128)

        from pybqe.point_cloud.recolor import compensate_window

        compensated = compensate_window(window)
        neighbors = knn(window.target.geometry, window.target.geometry, 4)

        with torch.no_grad():
            direct, _ = self.model(
                window_tensor(compensated),
                torch.as_tensor(window.target.geometry, dtype=torch.float64),
                torch.as_tensor(neighbors.indices),
                torch.as_tensor(neighbors.distances)
            )

        np.testing.assert_allclose(enhanced.attributes, direct.numpy(), atol=1e-9)

    def test_quality_of_a_whole_frame(self):
        quality = qe_forward(self.luma[0], self.model.quality_estimator, patch_size=128)
        self.assertAlmostEqual(float(quality.as_array().sum()), 1., places=9)

        neighbors = knn(self.luma[0].geometry, self.luma[0].geometry, 4)

        with torch.no_grad():
            direct = self.model.quality_estimator(
                torch.as_tensor(self.luma[0].attributes),
                torch.as_tensor(self.luma[0].geometry, dtype=torch.float64),
                torch.as_tensor(neighbors.indices),
                torch.as_tensor(neighbors.distances)
            )

        np.testing.assert_allclose(quality.as_array(), direct.numpy(), atol=1e-12)

    def test_patched_quality_is_a_distribution(self):
        quality = qe_forward(self.luma[0], self.model.quality_estimator, patch_size=30)
        self.assertAlmostEqual(float(quality.as_array().sum()), 1., places=9)

    def test_no_qe_model(self):
        model = BqeModel(small_model_config(ablation="no-qe", zero_init_head=False))
        enhanced = bqe_forward(make_window(self.luma, 0, 1), model, patch_size=128)
        self.assertEqual(enhanced.attributes.shape, (80, 1))

    def test_channel_mismatch(self):

        with self.assertRaises(ValueError):
            bqe_forward(make_window(self.rgb, 1, 1), self.model)

    def test_radius_mismatch(self):

        with self.assertRaises(ValueError):
            bqe_forward(make_window(self.luma, 1, 2), self.model)

    def test_sequence(self):
        enhanced = enhance_sequence(self.luma, self.identity, patch_size=128)
        self.assertEqual([frame.frame_index for frame in enhanced], [0, 1, 2, 3])

        for original, frame in zip(self.luma, enhanced):
            np.testing.assert_array_equal(frame.attributes, original.attributes)


class SequenceValidatorTests(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.frames = [random_frame(10, channels=3, seed=t, frame_index=t) for t in range(3)]

    def test_fit_learns_the_channel_count(self):
        self.assertEqual(SequenceValidator().fit(self.frames).n_channels, 3)
        self.assertEqual(SequenceValidator(n_channels=1).fit(self.frames).n_channels, 1)

    def test_frames_are_sorted_in_time(self):
        shuffled = [self.frames[2], self.frames[0], self.frames[1]]
        ordered = SequenceValidator().fit_transform(shuffled)
        self.assertEqual([frame.frame_index for frame in ordered], [0, 1, 2])

    def test_unfitted_validator(self):

        with self.assertRaises(ValueError):
            SequenceValidator().transform(self.frames)

    def test_rejections(self):
        out_of_range = self.frames[0].with_attributes(self.frames[0].attributes + 300.)

        for frames in (
            [],
            [self.frames[0], self.frames[0]],
            [random_frame(10, channels=1)],
            [out_of_range],
            ["frame"]
        ):
            with self.subTest(frames=len(frames)):
                with self.assertRaises(ValueError):
                    SequenceValidator(n_channels=3).transform(frames)


class TransformerTests(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.rgb = make_toy_sequence(n_frames=3, n_points=50, seed=5)
        cls.ycbcr = ColorSpaceTransformer("rgb_to_ycbcr").fit_transform(cls.rgb)

    def test_colour_round_trip(self):
        back = ColorSpaceTransformer("ycbcr_to_rgb").fit_transform(self.ycbcr)

        for original, frame in zip(self.rgb, back):
            np.testing.assert_allclose(frame.attributes, original.attributes, atol=1e-9)

    def test_unknown_direction(self):

        with self.assertRaises(ValueError):
            ColorSpaceTransformer("rgb_to_hsv").fit(self.rgb)

    def test_models_have_to_match_their_keys(self):

        with self.assertRaises(ValueError):
            SequenceEnhancer(models={"cb": BqeModel(small_model_config(component="y"))}).fit(self.ycbcr)

        with self.assertRaises(ValueError):
            SequenceEnhancer(models={}).fit(self.ycbcr)

    def test_components_without_a_model_pass_through(self):
        model = BqeModel(small_model_config(component="cb", zero_init_head=False))
        enhanced = SequenceEnhancer(models={"cb": model}, patch_size=64).fit_transform(self.ycbcr)

        for original, frame in zip(self.ycbcr, enhanced):
            np.testing.assert_array_equal(frame.attributes[:, [0, 2]], original.attributes[:, [0, 2]])
            np.testing.assert_array_equal(frame.geometry, original.geometry)
            self.assertFalse(np.array_equal(frame.attributes[:, 1], original.attributes[:, 1]))

    def test_single_channel_sequence(self):
        luma = [frame.component(0) for frame in self.ycbcr]
        model = BqeModel(small_model_config())
        enhanced = SequenceEnhancer(models={"y": model}, patch_size=64).fit_transform(luma)
        np.testing.assert_array_equal(enhanced[1].attributes, luma[1].attributes)

        with self.assertRaises(ValueError):
            SequenceEnhancer(
                models={"y": model, "cb": BqeModel(small_model_config(component="cb"))}
            ).fit_transform(luma)

    def test_untrained_models_leave_the_sequence_alone(self):
        models = {component: BqeModel(small_model_config(component=component)) for component in ("y", "cb", "cr")}
        enhanced = SequenceEnhancer(models=models, patch_size=64).fit_transform(self.ycbcr)

        for original, frame in zip(self.ycbcr, enhanced):
            np.testing.assert_array_equal(frame.attributes, original.attributes)
