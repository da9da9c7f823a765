"""Comparison scores and the score CSV format.

A failed comparison carries ``score=None``. On input, ``FAIL``, ``NaN`` and
``-1`` all read as failures.
"""
import csv
import math
from dataclasses import dataclass

import numpy as np

from core.exceptions import ConfigError
from evaluation.sentinels import Orientation

FAIL = 'FAIL'
SCORE_FIELDS = ('method_id', 'probe_id', 'gallery_id', 'genuine', 'score')
FAILURE_VALUES = (-1.0,)


@dataclass(frozen=True)
class ScoreRecord:
    method_id: str
    probe_id: str
    gallery_id: str
    genuine: bool
    score: float = None

    @property
    def failed(self):
        return self.score is None

    @property
    def pair_key(self):
        """Unordered pair of template ids"""
        return tuple(sorted((self.probe_id, self.gallery_id)))

    def with_score(self, score):
        return ScoreRecord(self.method_id, self.probe_id, self.gallery_id,
                           self.genuine, score)


@dataclass(frozen=True)
class ScoreSet:
    """Scored records after a failure protocol.

    ``failed`` counts the failed records the protocol saw, ``fte`` is the
    failure-to-enroll rate measured before they were dropped or replaced.
    """
    records: tuple
    fte: float = 0.0
    failed: int = 0
    orientation: Orientation = Orientation.DISSIMILARITY

    def __len__(self):
        return len(self.records)

    def _scores(self, genuine):
        return np.array([r.score for r in self.records
                         if r.genuine is genuine], dtype=np.float64)

    @property
    def genuine(self):
        return self._scores(True)

    @property
    def imposter(self):
        return self._scores(False)


def parse_score(text):
    text = text.strip()
    if text.upper() == FAIL:
        return None
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f'bad score {text!r}')
    if math.isnan(value) or value in FAILURE_VALUES:
        return None
    return value


def format_score(score):
    return FAIL if score is None else repr(float(score))


def read_scores_csv(path):
    records = []
    with open(path, newline='') as handle:
        reader = csv.DictReader(handle)
        missing = set(SCORE_FIELDS) - set(reader.fieldnames or ())
        if missing:
            raise ConfigError(
                f'{path}: missing columns {", ".join(sorted(missing))}'
            )
        for number, row in enumerate(reader, start=2):
            if row['genuine'] not in ('0', '1'):
                raise ConfigError(
                    f'{path}:{number}: genuine must be 0 or 1, '
                    f'got {row["genuine"]!r}'
                )
            try:
                score = parse_score(row['score'])
            except ConfigError as exc:
                raise ConfigError(f'{path}:{number}: {exc}') from exc
            records.append(ScoreRecord(row['method_id'], row['probe_id'],
                                       row['gallery_id'],
                                       row['genuine'] == '1', score))
    return records


def write_scores_csv(path, records):
    with open(path, 'w', newline='') as handle:
        writer = csv.writer(handle)
        writer.writerow(SCORE_FIELDS)
        for record in records:
            writer.writerow((record.method_id, record.probe_id,
                             record.gallery_id, int(record.genuine),
                             format_score(record.score)))
    return path


def by_method(records):
    """Records grouped by method id, methods in order of first appearance"""
    grouped = {}
    for record in records:
        grouped.setdefault(record.method_id, []).append(record)
    return grouped
