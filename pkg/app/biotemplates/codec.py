"""Byte layouts for templates.

Canonical (``.irxt``)::

    b'IRXT' | version u8 | eye u8 | kind u8 | kind header | payload

kind header, unsigned 32-bit little endian dims:
    embedding  dim, metric u8
    binary     k, R, A
    crypt      H, W

payload: embeddings as little-endian float64; boolean arrays bit-packed
row-major into little-endian uint64 words, bit i of word w holding element
64*w + i, zero padded. A binary code packs its bits then, in fresh words,
its occlusion mask.

Wire (``.irxw``), the IREX layout: eye u8 followed by the raw payload with
no header: float64 values, or one byte per boolean (code planes k-major then
row-major, then the occlusion mask; crypt cells row-major).
"""
import struct
from pathlib import Path

import numpy as np

from biotemplates.schema import (
    BinaryCodeTemplate, CryptMaskTemplate, EyeLabel, FloatEmbeddingTemplate,
    Kind, Metric, Template,
)
from core.exceptions import (
    Corrupt, InvalidTemplate, NotATemplate, UnsupportedVersion,
)

MAGIC = b'IRXT'
VERSION = 1
PREFIX = struct.Struct('<4sBBB')
DIM = struct.Struct('<I')
CANONICAL_SUFFIX = '.irxt'
WIRE_SUFFIX = '.irxw'
WORD_BYTES = 8


def packed_size(nbits):
    """Bytes taken by ``nbits`` booleans once packed into 64-bit words"""
    return -(-nbits // 64) * WORD_BYTES


def pack_bits(flags):
    flat = np.ascontiguousarray(flags, dtype=bool).ravel()
    packed = np.packbits(flat, bitorder='little')
    out = np.zeros(packed_size(flat.size), dtype=np.uint8)
    out[:packed.size] = packed
    return out.tobytes()


def unpack_bits(data, count, shape):
    raw = np.frombuffer(data, dtype=np.uint8)
    if raw.size != packed_size(count):
        raise Corrupt(f'expected {packed_size(count)} packed bytes, '
                      f'got {raw.size}')
    flags = np.unpackbits(raw, bitorder='little')
    if flags[count:].any():
        raise Corrupt('non-zero padding bits')
    return flags[:count].astype(bool).reshape(shape)


def canonical_size(template):
    payload = template.payload
    size = PREFIX.size
    if payload.kind is Kind.FLOAT_EMBEDDING:
        return size + DIM.size + 1 + WORD_BYTES * payload.dim
    if payload.kind is Kind.BINARY_CODE:
        k, rows, cols = payload.shape
        return size + 3 * DIM.size + packed_size(k * rows * cols) \
            + packed_size(rows * cols)
    return size + 2 * DIM.size + packed_size(payload.cells.size)


def _dims(*values):
    return b''.join(DIM.pack(int(value)) for value in values)


def _aligned(shape):
    """Planes fill whole words: the flat packing equals the per-plane one"""
    return shape[1] * shape[2] % 64 == 0


def _code_payload(code):
    if _aligned(code.shape):
        return [code.words.astype('<u8').tobytes(),
                code.occlusion_words.astype('<u8').tobytes()]
    return [pack_bits(code.bits), pack_bits(code.occlusion)]


def serialize_canonical(template):
    payload = template.payload
    parts = [PREFIX.pack(MAGIC, VERSION, template.eye, payload.kind)]
    if payload.kind is Kind.FLOAT_EMBEDDING:
        parts += [_dims(payload.dim), bytes([payload.metric]),
                  payload.values.astype('<f8').tobytes()]
    elif payload.kind is Kind.BINARY_CODE:
        parts += [_dims(*payload.shape), *_code_payload(payload)]
    else:
        parts += [_dims(*payload.shape), pack_bits(payload.cells)]
    return b''.join(parts)


class _Reader:
    """Cursor over a byte buffer raising ``Corrupt`` on truncation"""

    def __init__(self, data):
        self.data = memoryview(data)
        self.offset = 0

    def take(self, size):
        end = self.offset + size
        if end > len(self.data):
            raise Corrupt(f'truncated at byte {len(self.data)}, '
                          f'needed {end}')
        chunk = self.data[self.offset:end]
        self.offset = end
        return bytes(chunk)

    def dims(self, count):
        return struct.unpack(f'<{count}I', self.take(count * DIM.size))

    def finish(self):
        if self.offset != len(self.data):
            raise Corrupt(f'{len(self.data) - self.offset} trailing bytes')


def _read_code(reader, shape):
    k, rows, cols = shape
    bits = reader.take(packed_size(k * rows * cols))
    occlusion = reader.take(packed_size(rows * cols))
    if _aligned(shape):
        return BinaryCodeTemplate.from_words(
            np.frombuffer(bits, '<u8').reshape(k, rows * cols // 64),
            np.frombuffer(occlusion, '<u8'), shape)
    return BinaryCodeTemplate(
        unpack_bits(bits, k * rows * cols, shape),
        unpack_bits(occlusion, rows * cols, (rows, cols)),
    )


def deserialize_canonical(data):
    if len(data) < len(MAGIC) or bytes(data[:len(MAGIC)]) != MAGIC:
        raise NotATemplate('missing IRXT magic')
    reader = _Reader(data)
    _, version, eye, kind = PREFIX.unpack(reader.take(PREFIX.size))
    if version != VERSION:
        raise UnsupportedVersion(f'template version {version}')
    try:
        eye, kind = EyeLabel(eye), Kind(kind)
    except ValueError as exc:
        raise Corrupt(str(exc)) from exc

    try:
        if kind is Kind.FLOAT_EMBEDDING:
            (dim,) = reader.dims(1)
            metric = Metric(reader.take(1)[0])
            values = np.frombuffer(reader.take(WORD_BYTES * dim), '<f8')
            payload = FloatEmbeddingTemplate(values.astype(np.float64),
                                             metric)
        elif kind is Kind.BINARY_CODE:
            payload = _read_code(reader, reader.dims(3))
        else:
            height, width = reader.dims(2)
            cells = unpack_bits(reader.take(packed_size(height * width)),
                                height * width, (height, width))
            payload = CryptMaskTemplate(cells)
    except (InvalidTemplate, ValueError) as exc:
        raise Corrupt(str(exc)) from exc
    reader.finish()
    return Template(eye, payload)


def serialize_wire_irex(template):
    payload = template.payload
    head = bytes([template.eye])
    if payload.kind is Kind.FLOAT_EMBEDDING:
        return head + payload.values.astype('<f8').tobytes()
    if payload.kind is Kind.BINARY_CODE:
        return head + payload.bits.astype(np.uint8).tobytes() \
            + payload.occlusion.astype(np.uint8).tobytes()
    return head + payload.cells.astype(np.uint8).tobytes()


def _wire_flags(reader, shape):
    flags = np.frombuffer(reader.take(int(np.prod(shape))), dtype=np.uint8)
    if flags.max(initial=0) > 1:
        raise Corrupt('boolean bytes must be 0 or 1')
    return flags.astype(bool).reshape(shape)


def deserialize_wire_irex(data, kind, *, dim=None, metric=Metric.ANGULAR,
                          shape=None):
    """Inverse of ``serialize_wire_irex``; the layout carries no dims.

    ``dim`` is required for embeddings, ``shape`` ((k, R, A) or (H, W)) for
    boolean kinds.
    """
    reader = _Reader(data)
    try:
        eye = EyeLabel(reader.take(1)[0])
    except ValueError as exc:
        raise Corrupt(str(exc)) from exc
    kind = Kind(kind)
    try:
        if kind is Kind.FLOAT_EMBEDDING:
            values = np.frombuffer(reader.take(WORD_BYTES * dim), '<f8')
            payload = FloatEmbeddingTemplate(values.astype(np.float64),
                                             metric)
        elif kind is Kind.BINARY_CODE:
            bits = _wire_flags(reader, tuple(shape))
            occlusion = _wire_flags(reader, tuple(shape[1:]))
            payload = BinaryCodeTemplate(bits, occlusion)
        else:
            payload = CryptMaskTemplate(_wire_flags(reader, tuple(shape)))
    except InvalidTemplate as exc:
        raise Corrupt(str(exc)) from exc
    reader.finish()
    return Template(eye, payload)


def read_template(path):
    path = Path(path)
    if path.suffix != CANONICAL_SUFFIX:
        raise NotATemplate(f'{path}: only {CANONICAL_SUFFIX} files carry '
                           f'their own dimensions')
    return deserialize_canonical(path.read_bytes())


def write_template(template, path):
    path = Path(path)
    if path.suffix == WIRE_SUFFIX:
        data = serialize_wire_irex(template)
    else:
        data = serialize_canonical(template)
    path.write_bytes(data)
    return path
