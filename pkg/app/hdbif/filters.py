"""Filter banks for binary iris codes.

File format: a header line ``HDBIF-FILTERS k s`` followed by k*s*s
whitespace-separated decimals, each kernel row-major.
"""
import logging
from dataclasses import dataclass

import numpy as np

from core.exceptions import BadFilterFile

logger = logging.getLogger(__name__)

HEADER = 'HDBIF-FILTERS'
ZERO_MEAN_TOLERANCE = 1e-6


@dataclass(frozen=True, eq=False)
class FilterBank:
    """k zero-mean kernels of odd side s, shape (k, s, s)"""
    weights: np.ndarray

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=np.float64)
        if weights.ndim != 3 or weights.shape[1] != weights.shape[2]:
            raise BadFilterFile(f'kernels must be square, got {weights.shape}')
        if weights.shape[1] % 2 == 0:
            raise BadFilterFile(f'kernel side {weights.shape[1]} is even')
        object.__setattr__(self, 'weights', weights)

    @property
    def k(self):
        return self.weights.shape[0]

    @property
    def s(self):
        return self.weights.shape[1]


def _recentered(weights, source):
    sums = weights.sum(axis=(1, 2))
    for index in np.flatnonzero(np.abs(sums) > ZERO_MEAN_TOLERANCE):
        logger.warning('%s: kernel %d sums to %.3g, re-centering',
                       source, index, sums[index])
        weights[index] -= weights[index].mean()
    return weights


def parse_filter_bank(text, source='<filters>'):
    tokens = text.split()
    if len(tokens) < 3 or tokens[0] != HEADER:
        raise BadFilterFile(f'{source}: missing "{HEADER} k s" header')
    try:
        k, s = int(tokens[1]), int(tokens[2])
        values = np.array([float(token) for token in tokens[3:]])
    except ValueError as exc:
        raise BadFilterFile(f'{source}: {exc}') from exc
    if k <= 0 or s <= 0:
        raise BadFilterFile(f'{source}: k and s must be positive')
    if s % 2 == 0:
        raise BadFilterFile(f'{source}: kernel side {s} is even')
    if values.size != k * s * s:
        raise BadFilterFile(f'{source}: expected {k * s * s} weights, '
                            f'found {values.size}')
    if not np.all(np.isfinite(values)):
        raise BadFilterFile(f'{source}: weights must be finite')
    return FilterBank(_recentered(values.reshape(k, s, s), source))


def load_filter_bank(path):
    with open(path) as handle:
        return parse_filter_bank(handle.read(), source=str(path))


def write_filter_bank(bank, path):
    with open(path, 'w') as handle:
        handle.write(f'{HEADER} {bank.k} {bank.s}\n')
        for kernel in bank.weights:
            for row in kernel:
                handle.write(' '.join(repr(float(w)) for w in row) + '\n')


def default_filter_bank(k=7, s=9, seed=0):
    """Seeded pseudo-random zero-mean bank for running without a filter file"""
    if s % 2 == 0:
        raise BadFilterFile(f'kernel side {s} is even')
    rng = np.random.default_rng(seed)
    weights = rng.standard_normal((k, s, s))
    weights -= weights.mean(axis=(1, 2), keepdims=True)
    return FilterBank(weights)
