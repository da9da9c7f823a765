import math
import os
import tempfile

import numpy as np
from django.test import SimpleTestCase

from biotemplates.schema import EyeLabel, FloatEmbeddingTemplate, Metric
from core.exceptions import DegenerateEmbedding, IncompatibleTemplates
from embedding.distances import (
    angular_distance, angular_distances, embedding_matrix,
    euclidean_distance, euclidean_distances, normalize_embedding,
    read_embeddings_csv,
)


def sample_unit(values):
    return FloatEmbeddingTemplate(normalize_embedding(values))


def sample_point(values):
    return FloatEmbeddingTemplate(np.asarray(values, dtype=float),
                                  Metric.EUCLIDEAN)


class AngularDistanceTests(SimpleTestCase):
    """Test angles between unit embeddings"""

    def test_known_angles(self):
        """Test identical, orthogonal and opposite directions"""
        x = sample_unit([1.0, 0.0])

        self.assertEqual(angular_distance(x, x), 0.0)
        self.assertAlmostEqual(angular_distance(x, sample_unit([0, 1])),
                               math.pi / 2, places=12)
        self.assertAlmostEqual(angular_distance(x, sample_unit([-1, 0])),
                               math.pi, places=12)

    def test_symmetric_and_bounded(self):
        """Test symmetry and the [0, pi] range"""
        rng = np.random.default_rng(1)
        for _ in range(100):
            a = sample_unit(rng.standard_normal(16))
            b = sample_unit(rng.standard_normal(16))

            distance = angular_distance(a, b)

            self.assertEqual(distance, angular_distance(b, a))
            self.assertTrue(0.0 <= distance <= math.pi)

    def test_scale_invariance(self):
        """Test that scaling before normalization does not move the angle"""
        rng = np.random.default_rng(2)
        raw_a, raw_b = rng.standard_normal(8), rng.standard_normal(8)

        self.assertAlmostEqual(
            angular_distance(sample_unit(raw_a), sample_unit(raw_b)),
            angular_distance(sample_unit(raw_a * 40.0),
                             sample_unit(raw_b * 0.01)),
            places=12,
        )

    def test_triangle_inequality(self):
        """Test the triangle inequality on random triples"""
        rng = np.random.default_rng(3)
        for _ in range(100):
            a, b, c = (sample_unit(rng.standard_normal(5)) for _ in range(3))

            self.assertLessEqual(
                angular_distance(a, c),
                angular_distance(a, b) + angular_distance(b, c) + 1e-12,
            )

    def test_batched_matches_pairwise(self):
        """Test that matrix scoring agrees with pairwise scoring"""
        rng = np.random.default_rng(4)
        probe = sample_unit(rng.standard_normal(32))
        gallery = [sample_unit(rng.standard_normal(32)) for _ in range(20)]

        batched = angular_distances(probe, embedding_matrix(gallery))

        for template, distance in zip(gallery, batched):
            self.assertAlmostEqual(distance,
                                   angular_distance(probe, template),
                                   places=12)

    def test_metric_mismatch(self):
        """Test that Euclidean templates are refused"""
        with self.assertRaises(IncompatibleTemplates):
            angular_distance(sample_unit([1, 0]), sample_point([1, 0]))

    def test_dimension_mismatch(self):
        """Test that embeddings of different length are refused"""
        with self.assertRaises(IncompatibleTemplates):
            angular_distance(sample_unit([1, 0]), sample_unit([1, 0, 0]))
        with self.assertRaises(IncompatibleTemplates):
            embedding_matrix([sample_unit([1, 0]), sample_unit([1, 0, 0])])


class EuclideanDistanceTests(SimpleTestCase):
    """Test Euclidean distances between raw embeddings"""

    def test_value(self):
        """Test the 3-4-5 triangle"""
        self.assertEqual(
            euclidean_distance(sample_point([0, 0]), sample_point([3, 4])),
            5.0,
        )

    def test_batched_matches_pairwise(self):
        """Test that matrix scoring agrees with pairwise scoring"""
        rng = np.random.default_rng(5)
        probe = sample_point(rng.standard_normal(16) * 10)
        gallery = [sample_point(rng.standard_normal(16) * 10)
                   for _ in range(20)]

        batched = euclidean_distances(probe, embedding_matrix(gallery))

        for template, distance in zip(gallery, batched):
            self.assertAlmostEqual(distance,
                                   euclidean_distance(probe, template),
                                   places=10)

    def test_metric_mismatch(self):
        """Test that angular templates are refused"""
        with self.assertRaises(IncompatibleTemplates):
            euclidean_distance(sample_point([1, 0]), sample_unit([1, 0]))


class NormalizeTests(SimpleTestCase):
    """Test projection onto the unit hypersphere"""

    def test_unit_norm(self):
        """Test that results have unit norm"""
        rng = np.random.default_rng(6)
        for _ in range(100):
            unit = normalize_embedding(rng.standard_normal(512) * 1e3)

            self.assertAlmostEqual(np.linalg.norm(unit), 1.0, places=12)

    def test_zero_vector(self):
        """Test that a zero vector has no direction"""
        with self.assertRaises(DegenerateEmbedding):
            normalize_embedding([0.0, 0.0])

    def test_non_finite(self):
        """Test that NaN components are refused"""
        with self.assertRaises(DegenerateEmbedding):
            normalize_embedding([1.0, float('nan')])


class EmbeddingsCsvTests(SimpleTestCase):
    """Test reading embedding CSV files"""

    def test_read(self):
        """Test that rows become templates keyed by image id"""
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'embeddings.csv')
            with open(path, 'w') as handle:
                handle.write('image_id,eye,v1,v2\n'
                             'a,L,3,4\n'
                             'b,R,0,2\n')

            angular = read_embeddings_csv(path)
            raw = read_embeddings_csv(path, Metric.EUCLIDEAN)

        self.assertEqual(set(angular), {'a', 'b'})
        self.assertEqual(angular['a'].eye, EyeLabel.LEFT)
        np.testing.assert_allclose(angular['a'].payload.values, [0.6, 0.8])
        np.testing.assert_array_equal(raw['b'].payload.values, [0.0, 2.0])
        self.assertIs(raw['b'].payload.metric, Metric.EUCLIDEAN)
