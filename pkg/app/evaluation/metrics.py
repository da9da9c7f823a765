"""Verification and identification accuracy.

Scores are dissimilarities: a comparison is accepted when its score is at or
below the threshold. Similarity score sets are negated first.
"""
import csv
from dataclasses import dataclass, field

import numpy as np
from django.conf import settings

from core.exceptions import ConfigError, InsufficientScores
from evaluation.sentinels import Orientation


@dataclass(frozen=True, eq=False)
class RocCurve:
    """FMR and FNMR at every distinct score, preceded by a reject-all point"""
    thresholds: np.ndarray
    fmr: np.ndarray
    fnmr: np.ndarray

    def rows(self):
        return zip(self.thresholds.tolist(), self.fmr.tolist(),
                   self.fnmr.tolist())


def roc_points(genuine, imposter):
    genuine = np.sort(np.asarray(genuine, dtype=np.float64))
    imposter = np.sort(np.asarray(imposter, dtype=np.float64))
    if genuine.size == 0 or imposter.size == 0:
        raise InsufficientScores(
            f'{genuine.size} genuine and {imposter.size} imposter scores'
        )
    thresholds = np.concatenate(
        ([-np.inf], np.unique(np.concatenate((genuine, imposter))))
    )
    accepted_genuine = np.searchsorted(genuine, thresholds, side='right')
    accepted_imposter = np.searchsorted(imposter, thresholds, side='right')
    return RocCurve(
        thresholds=thresholds,
        fmr=accepted_imposter / imposter.size,
        fnmr=(genuine.size - accepted_genuine) / genuine.size,
    )


def auc(curve):
    """Area under true-accept rate against FMR"""
    return float(np.trapezoid(1.0 - curve.fnmr, curve.fmr))


def eer(curve):
    """Crossing of FMR and FNMR, linear between neighboring thresholds"""
    gap = curve.fmr - curve.fnmr
    exact = np.flatnonzero(gap == 0)
    if exact.size:
        return float(curve.fmr[exact[0]])
    upper = int(np.flatnonzero(gap > 0)[0])
    lower = upper - 1
    weight = gap[lower] / (gap[lower] - gap[upper])
    return float(curve.fmr[lower]
                 + weight * (curve.fmr[upper] - curve.fmr[lower]))


def fnmr_at_fmr(curve, target):
    """FNMR at the largest threshold whose FMR does not exceed ``target``"""
    index = int(np.flatnonzero(curve.fmr <= target)[-1])
    return float(curve.fnmr[index])


def _variance(values):
    return float(np.var(values, ddof=1)) if values.size > 1 else 0.0


def dprime(genuine, imposter):
    genuine = np.asarray(genuine, dtype=np.float64)
    imposter = np.asarray(imposter, dtype=np.float64)
    separation = abs(genuine.mean() - imposter.mean())
    spread = np.sqrt((_variance(genuine) + _variance(imposter)) / 2.0)
    if spread == 0:
        return 0.0 if separation == 0 else float('inf')
    return float(separation / spread)


@dataclass(frozen=True)
class RankSource:
    """Candidate lists per probe and each probe's enrolled mate.

    A probe whose mate is ``None`` has no mate in the gallery.
    """
    candidates: dict
    mates: dict

    def rank_accuracy(self, k):
        hits = sum(
            1 for probe_id, mate in self.mates.items()
            if mate is not None
            and mate in self.candidates.get(probe_id, ())[:k]
        )
        mated = sum(1 for mate in self.mates.values() if mate is not None)
        total = len(self.mates)
        return {
            'mated': hits / mated if mated else 0.0,
            'all': hits / total if total else 0.0,
        }


def read_rank_source(candidates_path, mates_path):
    """Candidate CSV (``probe_id, rank, identity_id, score``) plus a mates
    CSV (``probe_id, identity_id``, empty identity for mateless probes)"""
    ranked = {}
    with open(candidates_path, newline='') as handle:
        for row in csv.DictReader(handle):
            try:
                rank = int(row['rank'])
            except (KeyError, ValueError) as exc:
                raise ConfigError(f'{candidates_path}: {exc}') from exc
            ranked.setdefault(row['probe_id'], []).append(
                (rank, row['identity_id']))
    mates = {}
    with open(mates_path, newline='') as handle:
        for row in csv.DictReader(handle):
            if 'probe_id' not in row or 'identity_id' not in row:
                raise ConfigError(f'{mates_path}: needs probe_id and '
                                  f'identity_id columns')
            mates[row['probe_id']] = row['identity_id'] or None
    candidates = {probe_id: [identity for _, identity in sorted(rows)]
                  for probe_id, rows in ranked.items()}
    return RankSource(candidates, mates)


@dataclass(frozen=True)
class MetricsReport:
    auc: float
    eer: float
    dprime: float
    fnmr_at_fmr: dict
    fte: float
    genuine_count: int
    imposter_count: int
    failed_count: int
    rank_k: dict = field(default_factory=dict)


def oriented_scores(score_set):
    genuine, imposter = score_set.genuine, score_set.imposter
    if score_set.orientation is Orientation.SIMILARITY:
        return -genuine, -imposter
    return genuine, imposter


def compute_metrics(score_set, fmr_targets=None, rank_source=None,
                    ranks=None):
    genuine, imposter = oriented_scores(score_set)
    curve = roc_points(genuine, imposter)
    targets = fmr_targets if fmr_targets is not None \
        else settings.IRIS_FMR_TARGETS
    rank_k = {}
    if rank_source is not None:
        for k in (ranks if ranks is not None else settings.IRIS_RANKS):
            rank_k[k] = rank_source.rank_accuracy(k)
    return MetricsReport(
        auc=auc(curve),
        eer=eer(curve),
        dprime=dprime(genuine, imposter),
        fnmr_at_fmr={target: fnmr_at_fmr(curve, target)
                     for target in sorted(targets)},
        fte=score_set.fte,
        genuine_count=int(genuine.size),
        imposter_count=int(imposter.size),
        failed_count=score_set.failed,
        rank_k=rank_k,
    )
