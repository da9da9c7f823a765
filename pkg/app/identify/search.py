"""1:N identification against an enrolled gallery"""
import csv
import enum
import logging
from dataclasses import dataclass, field

import numpy as np
from django.conf import settings

from biotemplates.schema import EyeLabel
from core.exceptions import (
    ConfigError, EmptyGallery, IrisError, NoComparablePair,
)
from crypts.emd import EmdConfig
from evaluation.sentinels import SentinelTable, load_sentinels
from hdbif.matching import ShiftStrategy
from identify.matchers import MatcherName, get_matcher

logger = logging.getLogger(__name__)

CANDIDATE_FIELDS = ('probe_id', 'rank', 'identity_id', 'score')


class FailurePolicy(enum.Enum):
    PROPAGATE = 'propagate'
    SENTINEL = 'sentinel'


@dataclass(frozen=True)
class SearchConfig:
    candidate_list_length: int = 50
    matcher: MatcherName = MatcherName.HDBIF
    max_shift: int = 16
    strategy: ShiftStrategy = ShiftStrategy.EVEN_THEN_NEIGHBORS
    failure_policy: FailurePolicy = FailurePolicy.SENTINEL
    sentinels: SentinelTable = field(default_factory=SentinelTable)
    workers: int = 1
    emd: EmdConfig = field(default_factory=EmdConfig)

    def __post_init__(self):
        try:
            object.__setattr__(self, 'matcher', MatcherName(self.matcher))
            object.__setattr__(self, 'strategy',
                               ShiftStrategy(self.strategy))
            object.__setattr__(self, 'failure_policy',
                               FailurePolicy(self.failure_policy))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.candidate_list_length < 1:
            raise ConfigError('candidate_list_length must be positive')
        if self.max_shift < 0:
            raise ConfigError('max_shift must be non-negative')
        if self.workers < 1:
            raise ConfigError('workers must be positive')

    @classmethod
    def from_settings(cls, **overrides):
        values = dict(
            candidate_list_length=settings.IRIS_CANDIDATE_LIST_LENGTH,
            max_shift=settings.IRIS_MAX_SHIFT,
            strategy=settings.IRIS_SHIFT_STRATEGY,
            failure_policy=settings.IRIS_FAILURE_POLICY,
            workers=settings.IRIS_SEARCH_WORKERS,
            emd=EmdConfig.from_settings(),
        )
        values.update(overrides)
        return cls(**values)

    @classmethod
    def from_run_config(cls, config):
        return cls(
            candidate_list_length=config.candidate_list_length,
            matcher=config.matcher,
            max_shift=config.max_shift,
            strategy=config.strategy,
            failure_policy=config.failure_policy,
            sentinels=load_sentinels(config.sentinels),
            workers=config.workers,
            emd=EmdConfig(config.emd_size_ratio_max, config.emd_min_overlap,
                          config.emd_max_iterations),
        )


@dataclass(frozen=True)
class Candidate:
    identity_id: str
    score: float
    rank: int


@dataclass(frozen=True)
class SearchResult:
    """Ranked candidates plus the identities that could not be scored.

    ``failures`` maps identity ids to a reason; under the sentinel policy
    those identities are also ranked with the sentinel score.
    """
    candidates: tuple
    failures: dict

    def __iter__(self):
        return iter(self.candidates)

    def __len__(self):
        return len(self.candidates)

    def __getitem__(self, index):
        return self.candidates[index]


def admissible(probe_eye, gallery_eye):
    """Homologous pairs only; an unspecified eye pairs with anything"""
    return (probe_eye is EyeLabel.UNSPECIFIED
            or gallery_eye is EyeLabel.UNSPECIFIED
            or probe_eye is gallery_eye)


def pair_comparisons(probe, entry):
    pairs = [(p, g) for p in probe for g in entry.templates
             if admissible(p.eye, g.eye)]
    if not pairs:
        raise NoComparablePair(
            f'no homologous pair between the probe and {entry.identity_id}'
        )
    return pairs


def aggregate_identity(scores):
    scores = np.asarray(scores, dtype=np.float64)
    if scores.size == 0:
        raise ValueError('no scores to aggregate')
    if not np.all(np.isfinite(scores)):
        raise ValueError('scores must be finite')
    return float(np.median(scores))


def identity_scores(probe, entry, cfg):
    """Scores feeding the median of one identity, pair by pair.

    An unspecified probe template contributes its best score over the
    admissible gallery templates; a left or right one contributes every
    admissible pair. Failed comparisons contribute nothing.
    """
    matcher = get_matcher(cfg.matcher)
    pair_comparisons(probe, entry)
    scores = []
    for template in probe:
        found = []
        for candidate in entry.templates:
            if not admissible(template.eye, candidate.eye):
                continue
            try:
                found.append(matcher.compare(template.payload,
                                             candidate.payload, cfg))
            except IrisError as exc:
                logger.debug('%s: comparison failed: %s',
                             entry.identity_id, exc)
        if found and template.eye is EyeLabel.UNSPECIFIED:
            found = [min(found)]
        scores.extend(found)
    return scores


@dataclass(frozen=True, eq=False)
class GalleryIndex:
    """Gallery templates flattened in enrollment order, grouped by identity"""
    identity_ids: tuple
    owners: np.ndarray
    starts: np.ndarray
    eyes: np.ndarray
    data: object

    @classmethod
    def build(cls, gallery, matcher):
        identity_ids, owners, eyes, payloads = [], [], [], []
        for number, entry in enumerate(gallery):
            identity_ids.append(entry.identity_id)
            for template in entry.templates:
                payloads.append(matcher.check(template.payload))
                owners.append(number)
                eyes.append(int(template.eye))
        owners = np.array(owners, dtype=np.int64)
        return cls(
            identity_ids=tuple(identity_ids),
            owners=owners,
            starts=np.searchsorted(owners, np.arange(len(identity_ids))),
            eyes=np.array(eyes, dtype=np.int64),
            data=matcher.pack(payloads),
        )

    def admissible(self, probe_eye):
        if probe_eye is EyeLabel.UNSPECIFIED:
            return np.ones(self.eyes.size, dtype=bool)
        return (self.eyes == probe_eye) | (self.eyes == EyeLabel.UNSPECIFIED)


def _grouped_medians(owners, values, count):
    """Median of ``values`` per owner in ``range(count)``, NaN when absent"""
    order = np.lexsort((values, owners))
    owners, values = owners[order], values[order]
    sizes = np.bincount(owners, minlength=count)
    starts = np.concatenate(([0], np.cumsum(sizes)[:-1]))
    medians = np.full(count, np.nan)
    present = sizes > 0
    low = (starts + (sizes - 1) // 2)[present]
    high = (starts + sizes // 2)[present]
    medians[present] = (values[low] + values[high]) / 2.0
    return medians


def search_1n(probe, gallery, cfg=None):
    cfg = cfg or SearchConfig.from_settings()
    if not len(gallery):
        raise EmptyGallery('gallery has no identities')
    if not probe:
        raise ValueError('probe has no templates')
    matcher = get_matcher(cfg.matcher)
    for template in probe:
        matcher.check(template.payload)

    with gallery.searching():
        index = gallery.cached_index(
            matcher.name, lambda g: GalleryIndex.build(g, matcher))
        count = len(index.identity_ids)
        comparable = np.zeros(count, dtype=bool)
        owners, values = [], []
        for template in probe:
            scores = matcher.score_many(template.payload, index.data, cfg)
            allowed = index.admissible(template.eye)
            comparable |= np.logical_or.reduceat(allowed, index.starts)
            usable = allowed & ~np.isnan(scores)
            if template.eye is EyeLabel.UNSPECIFIED:
                best = np.minimum.reduceat(np.where(usable, scores, np.inf),
                                           index.starts)
                found = np.logical_or.reduceat(usable, index.starts)
                owners.append(np.flatnonzero(found))
                values.append(best[found])
            else:
                owners.append(index.owners[usable])
                values.append(scores[usable])
        medians = _grouped_medians(np.concatenate(owners),
                                   np.concatenate(values), count)

    ranked, failures = [], {}
    for number, identity_id in enumerate(index.identity_ids):
        if not np.isnan(medians[number]):
            ranked.append((float(medians[number]), identity_id))
            continue
        failures[identity_id] = ('no comparable pair' if not comparable[number]
                                 else 'all comparisons failed')
        if cfg.failure_policy is FailurePolicy.SENTINEL:
            ranked.append((cfg.sentinels[matcher.method_id].value,
                           identity_id))
    if failures:
        logger.info('%d of %d identities could not be scored',
                    len(failures), count)

    ranked.sort()
    candidates = tuple(
        Candidate(identity_id, score, rank)
        for rank, (score, identity_id)
        in enumerate(ranked[:cfg.candidate_list_length], start=1)
    )
    return SearchResult(candidates, failures)


def write_candidates_csv(path, results):
    """``results`` yields ``(probe_id, candidates)`` in output order"""
    with open(path, 'w', newline='') as handle:
        writer = csv.writer(handle)
        writer.writerow(CANDIDATE_FIELDS)
        for probe_id, candidates in results:
            for candidate in candidates:
                writer.writerow((probe_id, candidate.rank,
                                 candidate.identity_id,
                                 repr(candidate.score)))
    return path
