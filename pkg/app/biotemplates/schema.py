"""Template data model shared by the matchers"""
import enum
from dataclasses import dataclass
from typing import Union

import numpy as np

from core.exceptions import InvalidTemplate

UNIT_NORM_TOLERANCE = 1e-9


class EyeLabel(enum.IntEnum):
    """Eye position; the integer value is the wire byte"""
    UNSPECIFIED = 0
    RIGHT = 1
    LEFT = 2

    @classmethod
    def parse(cls, text):
        """Accept names (``left``), initials (``L``) or wire values (``2``)"""
        value = str(text).strip().upper()
        for label in cls:
            if value in (label.name, label.name[0], str(label.value)):
                return label
        raise InvalidTemplate(f'unknown eye label {text!r}')

    def __str__(self):
        return self.name.capitalize()


class Metric(enum.IntEnum):
    ANGULAR = 0
    EUCLIDEAN = 1


class Kind(enum.IntEnum):
    FLOAT_EMBEDDING = 0
    BINARY_CODE = 1
    CRYPT_MASK = 2


@dataclass(frozen=True, eq=False)
class FloatEmbeddingTemplate:
    values: np.ndarray
    metric: Metric = Metric.ANGULAR

    kind = Kind.FLOAT_EMBEDDING

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise InvalidTemplate('embedding must be a non-empty vector')
        if not np.all(np.isfinite(values)):
            raise InvalidTemplate('embedding values must be finite')
        metric = Metric(self.metric)
        if metric is Metric.ANGULAR:
            norm = np.linalg.norm(values)
            if abs(norm - 1.0) > UNIT_NORM_TOLERANCE:
                raise InvalidTemplate(
                    f'angular embedding must be unit length, norm={norm!r}'
                )
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'metric', metric)

    @property
    def dim(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, FloatEmbeddingTemplate):
            return NotImplemented
        return self.metric == other.metric \
            and np.array_equal(self.values, other.values)


def pack_planes(flags):
    """Pack (..., R, A) booleans into (..., W) uint64 words per plane.

    Bit ``i`` of word ``w`` holds element ``64*w + i`` of the row-major
    plane; padding bits are zero.
    """
    flags = np.asarray(flags, dtype=bool)
    lead = flags.shape[:-2]
    flat = flags.reshape(lead + (-1,))
    words = -(-flat.shape[-1] // 64)
    packed = np.packbits(flat, axis=-1, bitorder='little')
    out = np.zeros(lead + (words * 8,), dtype=np.uint8)
    out[..., :packed.shape[-1]] = packed
    return out.view('<u8').astype(np.uint64, copy=False)


def unpack_planes(words, shape):
    """Inverse of ``pack_planes`` for planes of ``shape`` (..., R, A)"""
    raw = np.ascontiguousarray(words, dtype='<u8').view(np.uint8)
    flags = np.unpackbits(raw, axis=-1, count=shape[-2] * shape[-1],
                          bitorder='little')
    return flags.astype(bool).reshape(shape)


def plane_words(rows, cols):
    return -(-rows * cols // 64)


def _frozen(array):
    array.setflags(write=False)
    return array


class BinaryCodeTemplate:
    """Filter response bits (k, R, A) and the occlusion mask (R, A).

    Both are held packed per plane, ``words`` (k, W) and
    ``occlusion_words`` (W,); ``bits`` and ``occlusion`` unpack on access.
    """
    kind = Kind.BINARY_CODE

    def __init__(self, bits, occlusion):
        bits = np.asarray(bits, dtype=bool)
        occlusion = np.asarray(occlusion, dtype=bool)
        if bits.ndim != 3 or occlusion.shape != bits.shape[1:]:
            raise InvalidTemplate(
                f'code {bits.shape} and occlusion {occlusion.shape} '
                f'do not describe a (k, R, A) template'
            )
        self.words = _frozen(pack_planes(bits))
        self.occlusion_words = _frozen(pack_planes(occlusion))
        self.shape = tuple(bits.shape)

    @classmethod
    def from_words(cls, words, occlusion_words, shape):
        k, rows, cols = (int(v) for v in shape)
        width = plane_words(rows, cols)
        words = np.ascontiguousarray(words, dtype=np.uint64).view()
        occlusion_words = np.ascontiguousarray(
            occlusion_words, dtype=np.uint64).view()
        if words.shape != (k, width) or occlusion_words.shape != (width,):
            raise InvalidTemplate(
                f'packed code {words.shape} / {occlusion_words.shape} '
                f'does not fit shape {(k, rows, cols)}'
            )
        spare = width * 64 - rows * cols
        if spare and (np.any(words[:, -1] >> np.uint64(64 - spare))
                      or occlusion_words[-1] >> np.uint64(64 - spare)):
            raise InvalidTemplate('non-zero padding bits')
        code = cls.__new__(cls)
        code.words = _frozen(words)
        code.occlusion_words = _frozen(occlusion_words)
        code.shape = (k, rows, cols)
        return code

    @property
    def bits(self):
        return unpack_planes(self.words, self.shape)

    @property
    def occlusion(self):
        return unpack_planes(self.occlusion_words, self.shape[1:])

    def __eq__(self, other):
        if not isinstance(other, BinaryCodeTemplate):
            return NotImplemented
        return self.shape == other.shape \
            and np.array_equal(self.words, other.words) \
            and np.array_equal(self.occlusion_words, other.occlusion_words)


@dataclass(frozen=True, eq=False)
class CryptMaskTemplate:
    cells: np.ndarray

    kind = Kind.CRYPT_MASK

    def __post_init__(self):
        cells = np.ascontiguousarray(self.cells, dtype=bool)
        if cells.ndim != 2:
            raise InvalidTemplate('crypt mask must be two-dimensional')
        object.__setattr__(self, 'cells', cells)

    @property
    def shape(self):
        return self.cells.shape

    @property
    def area(self):
        return int(np.count_nonzero(self.cells))

    def __eq__(self, other):
        if not isinstance(other, CryptMaskTemplate):
            return NotImplemented
        return np.array_equal(self.cells, other.cells)


Payload = Union[FloatEmbeddingTemplate, BinaryCodeTemplate, CryptMaskTemplate]


@dataclass(frozen=True)
class Template:
    eye: EyeLabel
    payload: Payload

    def __post_init__(self):
        object.__setattr__(self, 'eye', EyeLabel(self.eye))

    @property
    def kind(self):
        return self.payload.kind
