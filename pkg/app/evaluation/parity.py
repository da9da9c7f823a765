"""Agreement between two implementations scoring the same pairs.

``B`` is the reference: R^2 uses its spread around its own mean.
"""
import csv
from dataclasses import dataclass

import numpy as np
from django.conf import settings

from core.exceptions import NoCommonPairs


@dataclass(frozen=True)
class ParityStats:
    count: int
    mad: float
    max_delta: float
    r2: float


@dataclass(frozen=True)
class ParityReport:
    genuine: ParityStats
    imposter: ParityStats
    matched: int
    only_a: int
    only_b: int


def _keyed(records):
    return {r.pair_key: r for r in records if not r.failed}


def matched_pairs(scores_a, scores_b):
    """Scores of the pairs both sides scored: ``(a, b, genuine)`` arrays"""
    keyed_a, keyed_b = _keyed(scores_a), _keyed(scores_b)
    common = sorted(keyed_a.keys() & keyed_b.keys())
    if not common:
        raise NoCommonPairs('the score files share no scored pair')
    a = np.array([keyed_a[key].score for key in common], dtype=np.float64)
    b = np.array([keyed_b[key].score for key in common], dtype=np.float64)
    genuine = np.array([keyed_b[key].genuine for key in common], dtype=bool)
    return a, b, genuine, len(keyed_a) - len(common), \
        len(keyed_b) - len(common)


def parity_stats(a, b):
    if a.size == 0:
        return None
    delta = np.abs(a - b)
    residual = float(np.sum((a - b) ** 2))
    spread = float(np.sum((b - b.mean()) ** 2))
    if spread == 0:
        r2 = 1.0 if residual == 0 else float('-inf')
    else:
        r2 = 1.0 - residual / spread
    return ParityStats(int(a.size), float(delta.mean()), float(delta.max()),
                       r2)


def parity(scores_a, scores_b):
    """MAD, max |delta| and R^2, separately for genuine and imposter pairs.

    Pairs scored on one side only are counted in ``only_a``/``only_b`` and
    left out of the statistics.
    """
    a, b, genuine, only_a, only_b = matched_pairs(scores_a, scores_b)
    return ParityReport(
        genuine=parity_stats(a[genuine], b[genuine]),
        imposter=parity_stats(a[~genuine], b[~genuine]),
        matched=int(a.size),
        only_a=only_a,
        only_b=only_b,
    )


@dataclass(frozen=True, eq=False)
class DeltaHistogram:
    counts: np.ndarray
    edges: np.ndarray

    def rows(self):
        return zip(self.edges[:-1].tolist(), self.edges[1:].tolist(),
                   self.counts.tolist())

    def as_dict(self):
        return {'edges': self.edges.tolist(), 'counts': self.counts.tolist()}

    def write_csv(self, path):
        with open(path, 'w', newline='') as handle:
            writer = csv.writer(handle)
            writer.writerow(('low', 'high', 'count'))
            writer.writerows(self.rows())
        return path


def emit_delta_histogram(scores_a, scores_b, bins=None):
    """Histogram of ``a - b`` over matched pairs"""
    a, b, _, _, _ = matched_pairs(scores_a, scores_b)
    counts, edges = np.histogram(
        a - b, bins=bins if bins is not None else settings.IRIS_HISTOGRAM_BINS
    )
    return DeltaHistogram(counts, edges)
