"""Failure-as-nonmatch substitutes per method.

Distances take their worst value (angles top out at pi, so 3.2; Euclidean
distances are unbounded, practically ~35, so 10000; Hamming-style scores
1.0); similarities take 0.
"""
import enum
from dataclasses import dataclass, field

from core.exceptions import ConfigError


class Orientation(enum.Enum):
    DISSIMILARITY = 'dissimilarity'
    SIMILARITY = 'similarity'


@dataclass(frozen=True)
class Sentinel:
    value: float
    orientation: Orientation = Orientation.DISSIMILARITY


DEFAULT_SENTINELS = {
    'ArcIris': Sentinel(3.2),
    'TripletIris': Sentinel(10000.0),
    'HDBIF': Sentinel(1.0),
    'OSIRIS': Sentinel(1.0),
    'USITv3': Sentinel(1.0),
    'WCI': Sentinel(1.0),
    'CRYPTS': Sentinel(1.0),
    'DGR': Sentinel(0.0, Orientation.SIMILARITY),
    'VeriEye': Sentinel(0.0, Orientation.SIMILARITY),
}


@dataclass(frozen=True)
class SentinelTable:
    entries: dict = field(default_factory=lambda: dict(DEFAULT_SENTINELS))

    def __getitem__(self, method_id):
        try:
            return self.entries[method_id]
        except KeyError:
            raise ConfigError(f'no failure sentinel for method {method_id!r}')

    def __contains__(self, method_id):
        return method_id in self.entries

    def covering(self, method_ids):
        """Raise unless every method has an entry"""
        missing = sorted(set(method_ids) - set(self.entries))
        if missing:
            raise ConfigError(f'no failure sentinel for {", ".join(missing)}')
        return self


def parse_sentinels(text, source='<sentinels>'):
    """``method = value[, orientation]`` lines extend the defaults"""
    entries = dict(DEFAULT_SENTINELS)
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        try:
            method, entry = (part.strip() for part in line.split('=', 1))
            value, *orientation = (part.strip() for part in entry.split(','))
            entries[method] = Sentinel(
                float(value),
                Orientation(orientation[0]) if orientation
                else Orientation.DISSIMILARITY,
            )
        except ValueError as exc:
            raise ConfigError(f'{source}:{number}: {exc}') from exc
    return SentinelTable(entries)


def load_sentinels(path=None):
    if path is None:
        return SentinelTable()
    with open(path) as handle:
        return parse_sentinels(handle.read(), source=str(path))
