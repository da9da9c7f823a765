"""Grayscale images and binary masks plus their Pillow-backed file I/O"""
import logging
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from core.exceptions import ImageFormatError, InvalidImage

logger = logging.getLogger(__name__)

MASK_THRESHOLD = 127


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Row-major intensities in [0, 1], shape (height, width)"""
    pixels: np.ndarray

    def __post_init__(self):
        pixels = np.asarray(self.pixels, dtype=np.float64)
        if pixels.ndim != 2 or pixels.size == 0:
            raise InvalidImage(f'expected a non-empty 2D raster, '
                               f'got shape {pixels.shape}')
        if not np.all(np.isfinite(pixels)) \
                or pixels.min() < 0.0 or pixels.max() > 1.0:
            raise InvalidImage('intensities must lie in [0, 1]')
        object.__setattr__(self, 'pixels', pixels)

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def height(self):
        return self.pixels.shape[0]

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """Row-major booleans, True marks an iris pixel"""
    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=bool)
        if bits.ndim != 2:
            raise InvalidImage(f'expected a 2D mask, got shape {bits.shape}')
        object.__setattr__(self, 'bits', bits)

    @property
    def width(self):
        return self.bits.shape[1]

    @property
    def height(self):
        return self.bits.shape[0]

    @property
    def area(self):
        """Number of iris pixels"""
        return int(np.count_nonzero(self.bits))

    def __eq__(self, other):
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)


def _open(path):
    try:
        image = Image.open(path)
        image.load()
    except (OSError, UnidentifiedImageError) as exc:
        raise ImageFormatError(f'{path}: {exc}') from exc
    return image


def _luminance(image, path):
    """Reduce any supported color depth to a float raster in [0, 1]"""
    if image.mode in ('I;16', 'I;16B', 'I;16L', 'I'):
        data = np.asarray(image, dtype=np.float64)
        maxval = 65535.0 if data.max(initial=0) > 255 else 255.0
        return np.clip(data / maxval, 0.0, 1.0)
    if image.mode == 'F':
        return np.clip(np.asarray(image, dtype=np.float64), 0.0, 1.0)
    if image.mode != 'L':
        logger.debug('%s: reducing %s to luminance', path, image.mode)
        image = image.convert('L')
    return np.asarray(image, dtype=np.float64) / 255.0


def read_gray(path):
    """Read a PGM/PNG (or any Pillow format) as a luminance GrayImage"""
    return GrayImage(_luminance(_open(path), path))


def read_mask(path):
    """Read a mask image; gray levels above 127 are iris pixels"""
    image = _open(path)
    if image.mode != 'L':
        image = image.convert('L')
    return BinaryMask(np.asarray(image) > MASK_THRESHOLD)


def _save(array, path):
    fmt = 'PPM' if str(path).lower().endswith('.pgm') else None
    Image.fromarray(array).save(path, format=fmt)


def write_gray(image, path):
    """Write an image as 8-bit PGM (``.pgm``) or by extension otherwise"""
    data = np.rint(image.pixels * 255.0).astype(np.uint8)
    _save(data, path)


def write_mask(mask, path):
    _save(np.where(mask.bits, 255, 0).astype(np.uint8), path)
