"""Masked fractional Hamming distance between binary iris codes.

Shift convention: comparing ``a`` with ``b`` at shift ``s`` aligns column
``j`` of ``a`` with column ``j + s`` of ``b`` (``b`` is rolled by ``-s``), so
``b = np.roll(a, 3, axis=-1)`` matches ``a`` perfectly at shift 3.
"""
import enum
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from django.conf import settings

from biotemplates.schema import pack_planes
from core.exceptions import IncompatibleTemplates, InsufficientOverlap

logger = logging.getLogger(__name__)

# gallery codes scored per numpy batch; a full-size batch stays in cache
CHUNK_SIZE = 64


class ShiftStrategy(enum.Enum):
    EXHAUSTIVE = 'exhaustive'
    EVEN_THEN_NEIGHBORS = 'even_then_neighbors'


@dataclass(frozen=True)
class MatchScore:
    score: float
    shift: int
    bits_compared: int


def popcount(words, axis=None):
    return np.bitwise_count(words).sum(axis=axis, dtype=np.int64)


def default_min_bits(shape):
    k, rows, cols = shape
    return settings.IRIS_MIN_BITS_FRACTION * k * rows * cols


def _check_pair(a, b):
    if a.shape != b.shape:
        raise IncompatibleTemplates(
            f'code shapes differ: {a.shape} vs {b.shape}'
        )


def _shift_key(shift):
    """Preference order: smaller |shift| first, then the negative shift"""
    return 2 * abs(shift) + (shift > 0)


def fractional_hamming(a, b, shift, min_bits=None):
    """Fraction of disagreeing bits over the mutually unoccluded positions"""
    _check_pair(a, b)
    k, _, cols = a.shape
    if abs(shift) > cols // 2:
        raise ValueError(f'shift {shift} exceeds half the angular '
                         f'resolution {cols}')
    if min_bits is None:
        min_bits = default_min_bits(a.shape)

    b_bits = np.roll(b.bits, -shift, axis=-1)
    b_occlusion = np.roll(b.occlusion, -shift, axis=-1)
    combined = a.occlusion_words & pack_planes(b_occlusion)
    compared = k * int(popcount(combined))
    if compared == 0 or compared < min_bits:
        raise InsufficientOverlap(
            f'{compared} comparable bits at shift {shift}'
        )
    disagree = (a.words ^ pack_planes(b_bits)) & combined
    return MatchScore(int(popcount(disagree)) / compared, shift, compared)


def candidate_shifts(max_shift, cols):
    limit = min(max_shift, cols // 2)
    return range(-limit, limit + 1)


def _better(candidate, best):
    if best is None:
        return True
    if candidate.score != best.score:
        return candidate.score < best.score
    return _shift_key(candidate.shift) < _shift_key(best.shift)


def _best_over(a, b, shifts, min_bits):
    best = None
    for shift in shifts:
        try:
            candidate = fractional_hamming(a, b, shift, min_bits)
        except InsufficientOverlap:
            continue
        if _better(candidate, best):
            best = candidate
    return best


def best_match(a, b, max_shift=None, strategy=ShiftStrategy.EXHAUSTIVE,
               min_bits=None):
    """Lowest fractional Hamming distance over the shift range.

    EVEN_THEN_NEIGHBORS scores the even shifts first and then only the two
    odd shifts next to the best even one.
    """
    _check_pair(a, b)
    if max_shift is None:
        max_shift = settings.IRIS_MAX_SHIFT
    if max_shift < 0:
        raise ValueError('max_shift must be non-negative')
    strategy = ShiftStrategy(strategy)
    shifts = candidate_shifts(max_shift, a.shape[-1])

    if strategy is ShiftStrategy.EXHAUSTIVE:
        best = _best_over(a, b, shifts, min_bits)
    else:
        best = _best_over(a, b, [s for s in shifts if s % 2 == 0], min_bits)
        if best is not None:
            neighbors = [best.shift + d for d in (-1, 1)
                         if best.shift + d in shifts]
            refined = _best_over(a, b, neighbors, min_bits)
            if refined is not None and _better(refined, best):
                best = refined
    if best is None:
        raise InsufficientOverlap('no shift left enough comparable bits')
    return best


@dataclass(frozen=True, eq=False)
class PackedCodes:
    """Many codes of one (k, R, A) shape, packed for batched matching"""
    bits: np.ndarray        # (M, k, W) uint64
    occlusion: np.ndarray   # (M, W) uint64
    shape: tuple

    @classmethod
    def from_templates(cls, codes):
        if not codes:
            raise ValueError('no codes to pack')
        shape = codes[0].shape
        for code in codes:
            if code.shape != shape:
                raise IncompatibleTemplates(
                    f'code shapes differ: {shape} vs {code.shape}'
                )
        k, width = codes[0].words.shape
        bits = np.empty((len(codes), k, width), dtype=np.uint64)
        occlusion = np.empty((len(codes), width), dtype=np.uint64)
        for row, code in enumerate(codes):
            bits[row] = code.words
            occlusion[row] = code.occlusion_words
        return cls(bits=bits, occlusion=occlusion, shape=tuple(shape))

    def __len__(self):
        return self.bits.shape[0]


class _ShiftedProbe:
    """Probe code rolled by every candidate shift, packed once"""

    def __init__(self, probe, shifts):
        self.k = probe.shape[0]
        self.bits = {}
        self.occlusion = {}
        bits, occlusion = probe.bits, probe.occlusion
        for shift in shifts:
            # rolling the probe by +s equals rolling the gallery code by -s
            self.bits[shift] = pack_planes(np.roll(bits, shift, -1))
            self.occlusion[shift] = pack_planes(np.roll(occlusion, shift, -1))

    def score(self, bits, occlusion, shift, min_bits):
        combined = occlusion & self.occlusion[shift]
        compared = self.k * popcount(combined, axis=-1)
        differ = np.bitwise_xor(bits, self.bits[shift])
        differ &= combined[:, np.newaxis, :]
        disagree = popcount(differ, axis=(-2, -1))
        failed = (compared == 0) | (compared < min_bits)
        with np.errstate(divide='ignore', invalid='ignore'):
            scores = np.where(failed, np.nan, disagree / compared)
        return scores, compared


class _Best:
    """Running per-row minimum with the shift tie rule"""

    def __init__(self, size):
        self.score = np.full(size, np.nan)
        self.shift = np.zeros(size, dtype=np.int64)
        self.compared = np.zeros(size, dtype=np.int64)

    def offer(self, rows, scores, shift, compared):
        current = self.score[rows]
        current_key = 2 * np.abs(self.shift[rows]) + (self.shift[rows] > 0)
        better = ~np.isnan(scores) & (
            np.isnan(current)
            | (scores < current)
            | ((scores == current) & (_shift_key(shift) < current_key))
        )
        chosen = rows[better]
        self.score[chosen] = scores[better]
        self.shift[chosen] = shift
        self.compared[chosen] = compared[better]


def _match_chunk(probe, bits, occlusion, shifts, strategy, min_bits):
    best = _Best(bits.shape[0])
    every = np.arange(bits.shape[0])
    first_pass = shifts if strategy is ShiftStrategy.EXHAUSTIVE \
        else [s for s in shifts if s % 2 == 0]
    for shift in first_pass:
        scores, compared = probe.score(bits, occlusion, shift, min_bits)
        best.offer(every, scores, shift, compared)

    if strategy is ShiftStrategy.EVEN_THEN_NEIGHBORS:
        scored = every[~np.isnan(best.score)]
        centers = best.shift[scored].copy()
        for delta in (-1, 1):
            targets = centers + delta
            for shift in np.unique(targets):
                shift = int(shift)
                if shift not in shifts:
                    continue
                rows = scored[targets == shift]
                scores, compared = probe.score(
                    bits[rows], occlusion[rows], shift, min_bits)
                best.offer(rows, scores, shift, compared)
    return best


def match_against(probe, gallery, max_shift=None,
                  strategy=ShiftStrategy.EXHAUSTIVE, min_bits=None,
                  workers=1):
    """Best-shift scores of one code against packed gallery codes.

    Returns ``(scores, shifts, bits_compared)``; failed comparisons score
    NaN. Results match ``best_match`` pair by pair and do not depend on
    ``workers``.
    """
    if tuple(probe.shape) != gallery.shape:
        raise IncompatibleTemplates(
            f'probe {probe.shape} vs gallery {gallery.shape}'
        )
    if max_shift is None:
        max_shift = settings.IRIS_MAX_SHIFT
    if min_bits is None:
        min_bits = default_min_bits(gallery.shape)
    strategy = ShiftStrategy(strategy)
    shifts = candidate_shifts(max_shift, gallery.shape[-1])
    shifted = _ShiftedProbe(probe, shifts)

    def run(start):
        stop = start + CHUNK_SIZE
        return _match_chunk(shifted, gallery.bits[start:stop],
                            gallery.occlusion[start:stop], shifts,
                            strategy, min_bits)

    starts = range(0, len(gallery), CHUNK_SIZE)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(start) for start in starts]
    return (
        np.concatenate([r.score for r in results]),
        np.concatenate([r.shift for r in results]),
        np.concatenate([r.compared for r in results]),
    )
