"""Earth Mover's Distance between crypt masks.

Every crypt pixel carries unit mass, rescaled so both masks weigh 1. The
transport cost is normalized by the pixel-center diagonal of the mask, so
scores lie in [0, 1]. Any failure (pre-check or solver) scores exactly 1.0.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from django.conf import settings
from scipy.spatial.distance import cdist

from core.exceptions import IncompatibleTemplates
from crypts.transport import transport_simplex

logger = logging.getLogger(__name__)

FAILURE_SCORE = 1.0


@dataclass(frozen=True)
class EmdConfig:
    size_ratio_max: float = 2.0
    min_overlap: float = 0.1
    max_iterations: int = None

    @classmethod
    def from_settings(cls):
        return cls(
            size_ratio_max=settings.IRIS_EMD_SIZE_RATIO_MAX,
            min_overlap=settings.IRIS_EMD_MIN_OVERLAP,
            max_iterations=settings.IRIS_EMD_MAX_ITERATIONS,
        )


def emd_pre_check(a, b, size_ratio_max, min_overlap):
    """Masks must be of similar size and overlap enough to be compared"""
    area_a, area_b = a.area, b.area
    if area_a == 0 or area_b == 0:
        return False
    if max(area_a, area_b) / min(area_a, area_b) > size_ratio_max:
        return False
    intersection = np.count_nonzero(a.cells & b.cells)
    union = np.count_nonzero(a.cells | b.cells)
    return intersection / union >= min_overlap


def raw_emd(a, b, max_iterations=None):
    """Unnormalized EMD in pixels, or None when the solver does not converge"""
    points_a = np.argwhere(a.cells).astype(np.float64)
    points_b = np.argwhere(b.cells).astype(np.float64)
    count_a, count_b = len(points_a), len(points_b)
    # integer masses keep the northwest-corner start exact
    result = transport_simplex(
        np.full(count_a, count_b), np.full(count_b, count_a),
        cdist(points_a, points_b), max_iterations=max_iterations,
    )
    if not result.converged:
        return None
    return result.cost / (count_a * count_b)


def emd_2d(a, b, config=None):
    if a.shape != b.shape:
        raise IncompatibleTemplates(
            f'crypt masks differ in shape: {a.shape} vs {b.shape}'
        )
    config = config or EmdConfig.from_settings()
    if not emd_pre_check(a, b, config.size_ratio_max, config.min_overlap):
        logger.debug('EMD pre-check failed (areas %d, %d)', a.area, b.area)
        return FAILURE_SCORE

    distance = raw_emd(a, b, config.max_iterations)
    if distance is None:
        logger.warning('EMD solver did not converge, scoring as failure')
        return FAILURE_SCORE
    height, width = a.shape
    diagonal = math.hypot(height - 1, width - 1)
    if diagonal == 0:
        return 0.0
    return min(1.0, distance / diagonal)
