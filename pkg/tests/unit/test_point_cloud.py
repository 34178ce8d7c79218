# -*- coding: utf-8 -*-
"""
Tests of the point cloud primitives: file IO, colour conversion, windows, neighbour search,
patching and recolouring.
"""

import os
import tempfile
import unittest
import numpy as np

from plyfile import PlyData, PlyElement
from pybqe.data_models.frame import PointCloudFrame, TemporalWindow, VirtualFrame
from pybqe.point_cloud.color import extract_component, rgb_to_ycbcr, ycbcr_to_rgb
from pybqe.point_cloud.neighborhood import knn
from pybqe.point_cloud.patches import fuse_patches, generate_patches
from pybqe.point_cloud.ply import PlyFormatError, load_ply, quantize_attributes, save_ply
from pybqe.point_cloud.recolor import compensate_window, recolor
from pybqe.point_cloud.toy import make_toy_sequence
from pybqe.point_cloud.window import make_window
from tests.helpers import distinct_distance_geometry, random_frame, random_geometry


class PlyTests(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.directory.cleanup()

    def _path(self, name: str) -> str:
        return os.path.join(self.directory.name, name)

    def test_rgb_round_trip_keeps_point_order(self):
        frame = random_frame(50, channels=3, seed=1)
        save_ply(frame, self._path("frame.ply"))
        loaded = load_ply(self._path("frame.ply"), frame_index=4, qp=37)
        np.testing.assert_array_equal(loaded.geometry, frame.geometry)
        np.testing.assert_array_equal(loaded.attributes, frame.attributes)
        self.assertEqual((loaded.frame_index, loaded.qp), (4, 37))

    def test_scalar_round_trip(self):
        frame = random_frame(20, channels=1, seed=2)
        save_ply(frame, self._path("frame.ply"))
        np.testing.assert_array_equal(load_ply(self._path("frame.ply")).attributes, frame.attributes)

    def test_ascii_input_is_accepted(self):
        data = np.array(
            [(0, 0, 0, 10, 20, 30), (1, 2, 3, 40, 50, 60)],
            dtype=[("x", "f4"), ("y", "f4"), ("z", "f4"), ("red", "u1"), ("green", "u1"), ("blue", "u1")]
        )
        PlyData([PlyElement.describe(data, "vertex")], text=True).write(self._path("ascii.ply"))
        frame = load_ply(self._path("ascii.ply"))
        np.testing.assert_array_equal(frame.geometry, [[0, 0, 0], [1, 2, 3]])
        np.testing.assert_array_equal(frame.attributes, [[10., 20., 30.], [40., 50., 60.]])

    def test_missing_colour_property_is_named(self):
        data = np.array(
            [(0, 0, 0, 10, 20)],
            dtype=[("x", "i4"), ("y", "i4"), ("z", "i4"), ("red", "u1"), ("green", "u1")]
        )
        PlyData([PlyElement.describe(data, "vertex")]).write(self._path("broken.ply"))

        with self.assertRaises(PlyFormatError) as context:
            load_ply(self._path("broken.ply"))

        self.assertEqual(context.exception.property_name, "blue")

    def test_missing_geometry_property_is_named(self):
        data = np.array([(0, 0, 10)], dtype=[("x", "i4"), ("y", "i4"), ("red", "u1")])
        PlyData([PlyElement.describe(data, "vertex")]).write(self._path("flat.ply"))

        with self.assertRaises(PlyFormatError) as context:
            load_ply(self._path("flat.ply"))

        self.assertEqual(context.exception.property_name, "z")

    def test_quantization_rounds_half_up_and_clamps(self):
        np.testing.assert_array_equal(
            quantize_attributes(np.array([[0.5, 1.49, 254.5, 300., -3.]])),
            [[1, 1, 255, 255, 0]]
        )

    def test_two_channel_frames_cannot_be_written(self):

        with self.assertRaises(ValueError):
            save_ply(random_frame(5, channels=2), self._path("frame.ply"))


class ColorTests(unittest.TestCase):

    def test_primaries(self):
        frame = PointCloudFrame(
            geometry=[[0, 0, 0], [1, 0, 0], [2, 0, 0]],
            attributes=[[255., 255., 255.], [0., 0., 0.], [255., 0., 0.]]
        )
        ycbcr = rgb_to_ycbcr(frame).attributes
        np.testing.assert_allclose(ycbcr[0], [255., 128., 128.], atol=1e-9)
        np.testing.assert_allclose(ycbcr[1], [0., 128., 128.], atol=1e-9)
        np.testing.assert_allclose(ycbcr[2, 0], 0.2126 * 255., atol=1e-9)
        np.testing.assert_allclose(ycbcr[2, 2], 255.5, atol=1e-9)

    def test_round_trip(self):
        frame = random_frame(40, channels=3, seed=3)
        np.testing.assert_allclose(ycbcr_to_rgb(rgb_to_ycbcr(frame)).attributes, frame.attributes, atol=1e-9)

    def test_geometry_is_untouched(self):
        frame = random_frame(10, channels=3, seed=4)
        np.testing.assert_array_equal(rgb_to_ycbcr(frame).geometry, frame.geometry)

    def test_conversion_needs_three_channels(self):

        with self.assertRaises(ValueError):
            rgb_to_ycbcr(random_frame(10, channels=1))

    def test_extract_component(self):
        frame = random_frame(10, channels=3, seed=5)
        np.testing.assert_allclose(
            extract_component(frame, "cb").attributes[:, 0],
            rgb_to_ycbcr(frame).attributes[:, 1]
        )

        single = random_frame(10, channels=1, seed=5)
        self.assertIs(extract_component(single, "y"), single)

        with self.assertRaises(ValueError):
            extract_component(frame, "alpha")


class WindowTests(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.sequence = [random_frame(8, seed=t, frame_index=t) for t in range(4)]

    def test_interior_window(self):
        window = make_window(self.sequence, 2, 1)
        self.assertEqual([frame.frame_index for frame in window.frames], [1, 2, 3])

    def test_windows_clamp_at_the_ends(self):
        self.assertEqual([frame.frame_index for frame in make_window(self.sequence, 0, 2).frames], [0, 0, 0, 1, 2])
        self.assertEqual([frame.frame_index for frame in make_window(self.sequence, 3, 2).frames], [1, 2, 3, 3, 3])

    def test_single_frame_sequence(self):
        window = make_window(self.sequence[:1], 0, 2)
        self.assertEqual(len(window), 5)
        self.assertTrue(all(frame is self.sequence[0] for frame in window.frames))

    def test_invalid_requests(self):

        with self.assertRaises(ValueError):
            make_window([], 0, 1)

        with self.assertRaises(ValueError):
            make_window(self.sequence, 4, 1)

        with self.assertRaises(ValueError):
            make_window(self.sequence, 0, -1)


class NeighborSearchTests(unittest.TestCase):

    @staticmethod
    def _oracle(query: np.ndarray, support: np.ndarray, k: int):
        squared = ((query[:, None, :].astype(float) - support[None, :, :]) ** 2).sum(axis=-1)
        rows = [sorted(range(support.shape[0]), key=lambda j: (row[j], j))[:k] for row in squared]
        indices = np.array(rows)
        return indices, np.sqrt(np.take_along_axis(squared, indices, axis=1))

    def test_matches_exhaustive_search(self):

        for seed in range(20):
            with self.subTest(seed=seed):
                geometry = random_geometry(64, seed=seed, extent=8)
                neighbors = knn(geometry, geometry, 8)
                indices, distances = self._oracle(geometry, geometry, 8)
                np.testing.assert_array_equal(neighbors.indices, indices)
                np.testing.assert_allclose(neighbors.distances, distances)

    def test_tree_search_matches_brute_force(self):
        from pybqe.point_cloud import neighborhood

        geometry = random_geometry(300, seed=7, extent=10)
        query = random_geometry(50, seed=8, extent=10)
        indices, squared = neighborhood._tree_search(query.astype(float), geometry.astype(float), 6)
        expected, distances = self._oracle(query, geometry, 6)
        np.testing.assert_array_equal(indices, expected)
        np.testing.assert_allclose(np.sqrt(squared), distances)

    def test_nearest_neighbour_is_the_point_itself(self):
        geometry = random_geometry(30, seed=9)
        np.testing.assert_array_equal(knn(geometry, geometry, 1).indices[:, 0], np.arange(30))

    def test_ties_go_to_the_lower_index(self):
        support = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0]])
        np.testing.assert_array_equal(knn([[0, 0, 0]], support, 2).indices, [[0, 1]])

    def test_permuting_the_support_permutes_the_indices(self):
        support = distinct_distance_geometry(40, seed=11)
        query = support[:15]
        perm = np.random.default_rng(13).permutation(40)
        neighbors = knn(query, support, 5)
        permuted = knn(query, support[perm], 5)
        np.testing.assert_array_equal(perm[permuted.indices], neighbors.indices)
        np.testing.assert_allclose(permuted.distances, neighbors.distances)

    def test_permuting_the_queries_permutes_the_rows(self):
        support = random_geometry(50, seed=14, extent=16)
        query = random_geometry(20, seed=15, extent=16)
        perm = np.random.default_rng(16).permutation(20)
        neighbors = knn(query, support, 6)
        permuted = knn(query[perm], support, 6)
        np.testing.assert_array_equal(permuted.indices, neighbors.indices[perm])
        np.testing.assert_allclose(permuted.distances, neighbors.distances[perm])

    def test_self_query_distances_are_symmetric(self):
        geometry = random_geometry(25, seed=17, extent=8)
        neighbors = knn(geometry, geometry, 25)
        matrix = np.zeros((25, 25))
        np.put_along_axis(matrix, neighbors.indices, neighbors.distances, axis=1)
        np.testing.assert_allclose(matrix, matrix.T)
        np.testing.assert_array_equal(np.diag(matrix), 0.)

    def test_invalid_requests(self):
        geometry = random_geometry(5)

        with self.assertRaises(ValueError):
            knn(geometry, geometry, 6)

        with self.assertRaises(ValueError):
            knn(geometry, geometry, 0)

        with self.assertRaises(ValueError):
            knn(geometry, np.empty((0, 3)), 1)


class PatchTests(unittest.TestCase):

    def test_small_frames_are_one_patch(self):
        patches = generate_patches(random_frame(30), patch_size=64)
        self.assertEqual(len(patches), 1)
        np.testing.assert_array_equal(patches.patches[0], np.arange(30))

    def test_patches_cover_every_point(self):
        frame = random_frame(500, seed=3)
        patches = generate_patches(frame, patch_size=64, stride_fraction=0.5)
        covered = np.zeros(500, dtype=bool)

        for patch in patches.patches:
            self.assertLessEqual(patch.size, 64)
            covered[patch] = True

        self.assertTrue(covered.all())
        self.assertGreaterEqual(len(patches), int(np.ceil(500 / 32)))

    def test_patching_is_deterministic(self):
        frame = random_frame(300, seed=4)
        self.assertEqual(generate_patches(frame, patch_size=50), generate_patches(frame, patch_size=50))

    def test_fusing_a_constant_gives_the_constant(self):
        frame = random_frame(300, seed=5)
        patches = generate_patches(frame, patch_size=50)
        fused = fuse_patches([(patch, np.full((patch.size, 2), 7.)) for patch in patches.patches], 300)
        np.testing.assert_allclose(fused, 7.)

    def test_fusing_averages_overlaps(self):
        fused = fuse_patches([([0, 1], [[1.], [2.]]), ([1, 2], [[4.], [5.]])], 3)
        np.testing.assert_allclose(fused[:, 0], [1., 3., 5.])

    def test_fusing_needs_full_coverage(self):

        with self.assertRaises(ValueError):
            fuse_patches([([0, 1], [[1.], [2.]])], 3)

        with self.assertRaises(ValueError):
            fuse_patches([([0, 1], [[1.]])], 2)

    def test_large_frames_give_full_patches(self):
        patches = generate_patches(random_frame(2048, seed=10), patch_size=1024, stride_fraction=0.5)
        self.assertGreaterEqual(len(patches), 4)

        for patch in patches.patches:
            self.assertEqual(patch.size, 1024)
            self.assertEqual(np.unique(patch).size, 1024)

    def test_invalid_settings(self):
        frame = random_frame(10)

        with self.assertRaises(ValueError):
            generate_patches(frame, patch_size=0)

        with self.assertRaises(ValueError):
            generate_patches(frame, patch_size=5, stride_fraction=1.5)


class RecolorTests(unittest.TestCase):

    def test_identity_on_shared_geometry(self):
        frame = random_frame(100, channels=3, seed=6)
        virtual = recolor(frame, frame.geometry)
        self.assertIsInstance(virtual, VirtualFrame)
        np.testing.assert_array_equal(virtual.attributes, frame.attributes)

    def test_inverse_distance_weighting(self):
        reference = PointCloudFrame(geometry=[[0, 0, 0], [4, 0, 0]], attributes=[0., 100.], frame_index=3)
        virtual = recolor(reference, [[1, 0, 0]], k_r=2)
        self.assertAlmostEqual(virtual.attributes[0, 0], 25.)
        self.assertEqual(virtual.source_index, 3)

    def test_gaussian_kernel_stays_in_range(self):
        reference = random_frame(50, seed=7)
        virtual = recolor(reference, random_geometry(30, seed=8), k_r=3, kernel="gaussian")
        self.assertTrue(np.all(virtual.attributes >= reference.attributes.min()))
        self.assertTrue(np.all(virtual.attributes <= reference.attributes.max()))

    def test_neighbour_count_is_capped(self):
        reference = PointCloudFrame(geometry=[[0, 0, 0]], attributes=[9.])
        np.testing.assert_array_equal(recolor(reference, [[3, 3, 3], [1, 0, 0]], k_r=3).attributes, [[9.], [9.]])

    def test_single_neighbour_copies_the_nearest_point(self):

        for seed in range(5):
            with self.subTest(seed=seed):
                reference = random_frame(60, channels=3, seed=seed, extent=16)
                target = random_geometry(40, seed=seed + 50, extent=16)
                squared = ((target[:, None, :] - reference.geometry[None, :, :]) ** 2).sum(axis=-1)
                nearest = np.argmin(squared, axis=1)
                np.testing.assert_array_equal(
                    recolor(reference, target, k_r=1).attributes,
                    reference.attributes[nearest]
                )

    def test_translating_both_clouds_changes_nothing(self):
        reference = random_frame(80, channels=3, seed=20, extent=32)
        target = random_geometry(50, seed=21, extent=32)
        shift = np.array([7, -3, 12])
        moved = PointCloudFrame(
            geometry=reference.geometry + shift,
            attributes=reference.attributes,
            frame_index=reference.frame_index
        )

        for kernel in ("idw", "gaussian"):
            with self.subTest(kernel=kernel):
                np.testing.assert_allclose(
                    recolor(moved, target + shift, k_r=3, kernel=kernel).attributes,
                    recolor(reference, target, k_r=3, kernel=kernel).attributes
                )

    def test_invalid_requests(self):
        frame = random_frame(10)

        with self.assertRaises(ValueError):
            recolor(frame, frame.geometry, k_r=0)

        with self.assertRaises(ValueError):
            recolor(frame, frame.geometry, kernel="nearest")

    def test_compensated_window_shares_target_geometry(self):
        sequence = make_toy_sequence(n_frames=3, n_points=64, seed=1)
        window = compensate_window(make_window(sequence, 1, 1))
        self.assertTrue(window.shares_geometry())
        self.assertIs(window.target, sequence[1])
        self.assertEqual([frame.source_index for frame in (window.frames[0], window.frames[2])], [0, 2])

    def test_static_window_is_unchanged(self):
        frame = random_frame(40, seed=9)
        window = compensate_window(TemporalWindow(frames=[frame] * 3, radius=1))

        for compensated in window.frames:
            np.testing.assert_array_equal(compensated.attributes, frame.attributes)


class ToySequenceTests(unittest.TestCase):

    def test_shape_and_range(self):
        sequence = make_toy_sequence(n_frames=4, n_points=100, seed=2)
        self.assertEqual(len(sequence), 4)

        for t, frame in enumerate(sequence):
            self.assertEqual((frame.n_points, frame.n_channels, frame.frame_index), (100, 3, t))
            self.assertTrue(np.all((frame.attributes >= 0) & (frame.attributes <= 255)))
            np.testing.assert_array_equal(frame.attributes, np.rint(frame.attributes))

    def test_frames_do_not_share_geometry(self):
        first, second = make_toy_sequence(n_frames=2, n_points=100, seed=2)
        self.assertFalse(np.array_equal(first.geometry, second.geometry))

    def test_seed_fixes_the_sequence(self):
        self.assertEqual(make_toy_sequence(2, 50, seed=3), make_toy_sequence(2, 50, seed=3))

    def test_invalid_sizes(self):

        with self.assertRaises(ValueError):
            make_toy_sequence(n_frames=0)
