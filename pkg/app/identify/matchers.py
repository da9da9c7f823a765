"""Matcher registry: template kind, pairwise and batched scoring per matcher.

Every matcher scores dissimilarities. Batched scores mark failed comparisons
with NaN; pairwise scoring raises the underlying ``IrisError`` instead.
"""
import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from biotemplates.schema import Kind, Metric
from core.exceptions import IncompatibleTemplates
from crypts.emd import emd_2d
from embedding.distances import (
    angular_distance, angular_distances, embedding_matrix,
    euclidean_distance, euclidean_distances,
)
from hdbif.matching import PackedCodes, best_match, match_against


class MatcherName(enum.Enum):
    HDBIF = 'hdbif'
    ANGULAR = 'angular'
    EUCLIDEAN = 'euclidean'
    CRYPTS_EMD = 'crypts_emd'


@dataclass(frozen=True)
class Matcher:
    name: MatcherName
    method_id: str
    kind: Kind
    metric: Metric
    compare: Callable
    pack: Callable
    score_many: Callable

    def check(self, payload):
        if payload.kind is not self.kind:
            raise IncompatibleTemplates(
                f'{self.name.value} matcher cannot score {payload.kind.name} '
                f'templates'
            )
        if self.metric is not None and payload.metric is not self.metric:
            raise IncompatibleTemplates(
                f'{self.name.value} matcher needs {self.metric.name} '
                f'embeddings, got {payload.metric.name}'
            )
        return payload


def _hdbif_compare(a, b, options):
    return best_match(a, b, options.max_shift, options.strategy).score


def _hdbif_many(probe, packed, options):
    scores, _, _ = match_against(probe, packed, options.max_shift,
                                 options.strategy, workers=options.workers)
    return scores


def _angular_compare(a, b, options):
    return angular_distance(a, b)


def _euclidean_compare(a, b, options):
    return euclidean_distance(a, b)


def _emd_compare(a, b, options):
    return emd_2d(a, b, options.emd)


def _emd_many(probe, masks, options):
    return np.array([emd_2d(probe, mask, options.emd) for mask in masks],
                    dtype=np.float64)


MATCHERS = {
    MatcherName.HDBIF: Matcher(
        MatcherName.HDBIF, 'HDBIF', Kind.BINARY_CODE, None,
        _hdbif_compare, PackedCodes.from_templates, _hdbif_many,
    ),
    MatcherName.ANGULAR: Matcher(
        MatcherName.ANGULAR, 'ArcIris', Kind.FLOAT_EMBEDDING, Metric.ANGULAR,
        _angular_compare, embedding_matrix,
        lambda probe, matrix, options: angular_distances(probe, matrix),
    ),
    MatcherName.EUCLIDEAN: Matcher(
        MatcherName.EUCLIDEAN, 'TripletIris', Kind.FLOAT_EMBEDDING,
        Metric.EUCLIDEAN, _euclidean_compare, embedding_matrix,
        lambda probe, matrix, options: euclidean_distances(probe, matrix),
    ),
    MatcherName.CRYPTS_EMD: Matcher(
        MatcherName.CRYPTS_EMD, 'CRYPTS', Kind.CRYPT_MASK, None,
        _emd_compare, list, _emd_many,
    ),
}


def get_matcher(name):
    return MATCHERS[MatcherName(name)]
