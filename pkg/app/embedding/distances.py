"""Distances between deep-embedding templates.

Angular distances are angles in [0, pi]; Euclidean distances are unbounded.
Everything accumulates in float64.
"""
import csv

import numpy as np

from biotemplates.schema import (
    EyeLabel, FloatEmbeddingTemplate, Metric, Template,
)
from core.exceptions import DegenerateEmbedding, IncompatibleTemplates


def normalize_embedding(values):
    """Project onto the unit hypersphere"""
    values = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise DegenerateEmbedding('embedding has non-finite values')
    norm = np.linalg.norm(values)
    if norm == 0.0:
        raise DegenerateEmbedding('zero vector has no direction')
    unit = values / norm
    # one more pass settles the norm to within a few ulps of 1
    return unit / np.linalg.norm(unit)


def _check(a, b, metric):
    for template in (a, b):
        if template.metric is not metric:
            raise IncompatibleTemplates(
                f'expected {metric.name} templates, got {template.metric.name}'
            )
    if a.dim != b.dim:
        raise IncompatibleTemplates(f'dimensions differ: {a.dim} vs {b.dim}')


def angular_distance(a, b):
    _check(a, b, Metric.ANGULAR)
    cosine = np.dot(normalize_embedding(a.values),
                    normalize_embedding(b.values))
    return float(np.arccos(np.clip(cosine, -1.0, 1.0)))


def euclidean_distance(a, b):
    _check(a, b, Metric.EUCLIDEAN)
    diff = a.values - b.values
    return float(np.sqrt(np.dot(diff, diff)))


def embedding_matrix(templates):
    """Stack equally sized embeddings into an (M, dim) float64 matrix"""
    dims = {t.dim for t in templates}
    if len(dims) > 1:
        raise IncompatibleTemplates(f'mixed embedding dimensions {dims}')
    return np.vstack([t.values for t in templates])


def angular_distances(probe, matrix):
    """Angles between one unit embedding and every row of ``matrix``"""
    if matrix.shape[1] != probe.dim:
        raise IncompatibleTemplates(
            f'dimensions differ: {probe.dim} vs {matrix.shape[1]}'
        )
    norms = np.linalg.norm(matrix, axis=1)
    cosine = (matrix @ normalize_embedding(probe.values)) / norms
    return np.arccos(np.clip(cosine, -1.0, 1.0))


def euclidean_distances(probe, matrix):
    if matrix.shape[1] != probe.dim:
        raise IncompatibleTemplates(
            f'dimensions differ: {probe.dim} vs {matrix.shape[1]}'
        )
    diff = matrix - probe.values
    return np.sqrt(np.einsum('ij,ij->i', diff, diff))


def read_embeddings_csv(path, metric=Metric.ANGULAR):
    """``image_id, eye, v1..vdim`` rows into templates keyed by image id.

    Angular embeddings are normalized on ingestion.
    """
    metric = Metric(metric)
    templates = {}
    with open(path, newline='') as handle:
        for row in csv.reader(handle):
            if not row or row[0] == 'image_id':
                continue
            image_id, eye, *values = row
            vector = np.array([float(v) for v in values])
            if metric is Metric.ANGULAR:
                vector = normalize_embedding(vector)
            templates[image_id] = Template(
                EyeLabel.parse(eye), FloatEmbeddingTemplate(vector, metric)
            )
    return templates
