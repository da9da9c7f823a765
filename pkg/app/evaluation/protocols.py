"""Failure-handling protocols turning raw score records into score sets"""
import logging
from dataclasses import dataclass

from django.conf import settings

from core.exceptions import ConfigError
from evaluation.scores import ScoreSet, by_method
from evaluation.sentinels import Orientation

logger = logging.getLogger(__name__)


def fte(records):
    """Share of templates for which every comparison failed"""
    outcomes = {}
    for record in records:
        for template_id in (record.probe_id, record.gallery_id):
            outcomes[template_id] = outcomes.get(template_id, False) \
                or not record.failed
    if not outcomes:
        return 0.0
    failed = sum(1 for ok in outcomes.values() if not ok)
    return failed / len(outcomes)


def protocol_discard(records, orientation=Orientation.DISSIMILARITY):
    records = list(records)
    kept = tuple(r for r in records if not r.failed)
    return ScoreSet(kept, fte(records), len(records) - len(kept),
                    Orientation(orientation))


def protocol_failure_as_nonmatch(records, sentinels):
    records = list(records)
    table = sentinels.covering({r.method_id for r in records})
    orientations = {table[r.method_id].orientation for r in records}
    if len(orientations) > 1:
        raise ConfigError('cannot mix similarity and dissimilarity methods')
    replaced = tuple(
        r.with_score(table[r.method_id].value) if r.failed else r
        for r in records
    )
    failed = sum(1 for r in records if r.failed)
    return ScoreSet(replaced, fte(records), failed,
                    orientations.pop() if orientations
                    else Orientation.DISSIMILARITY)


@dataclass(frozen=True)
class IntersectionResult:
    """Per-method score sets over the pairs every kept method scored"""
    sets: dict
    excluded: dict
    pair_count: int


def protocol_intersection(records_by_method, fte_threshold=None,
                          orientations=None):
    """Restrict methods to their commonly accepted pairs.

    Methods whose FTE exceeds ``fte_threshold`` are left out. Pairs are
    unordered, so (a, b) and (b, a) are the same pair.
    """
    if fte_threshold is None:
        fte_threshold = settings.IRIS_FTE_THRESHOLD
    orientations = orientations or {}
    if not isinstance(records_by_method, dict):
        records_by_method = by_method(records_by_method)

    kept, excluded = {}, {}
    for method_id, records in records_by_method.items():
        records = list(records)
        rate = fte(records)
        if rate > fte_threshold:
            logger.info('%s excluded from the intersection, FTE %.1f%%',
                        method_id, 100 * rate)
            excluded[method_id] = rate
        else:
            kept[method_id] = (records, rate)

    common = None
    for records, _ in kept.values():
        accepted = {r.pair_key for r in records if not r.failed}
        common = accepted if common is None else common & accepted
    common = common or set()

    sets = {}
    for method_id, (records, rate) in kept.items():
        scored = tuple(r for r in records
                       if not r.failed and r.pair_key in common)
        sets[method_id] = ScoreSet(
            scored, rate, sum(1 for r in records if r.failed),
            Orientation(orientations.get(method_id,
                                         Orientation.DISSIMILARITY)),
        )
    return IntersectionResult(sets, excluded, len(common))
