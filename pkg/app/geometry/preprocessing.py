"""Aspect-ratio padding and rescaling of raw eye images"""
import logging
from dataclasses import dataclass

import numpy as np

from core.exceptions import InvalidImage
from geometry import sampling
from geometry.circles import CircleParams
from geometry.rasters import BinaryMask, GrayImage

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FrameTransform:
    """Maps coordinates between the raw frame and the preprocessed frame.

    target = (source + pad) / scale
    """
    pad_x: int
    pad_y: int
    scale_x: float
    scale_y: float

    @property
    def radius_scale(self):
        return (self.scale_x + self.scale_y) / 2.0

    def to_target(self, c):
        return CircleParams(
            px=(c.px + self.pad_x) / self.scale_x,
            py=(c.py + self.pad_y) / self.scale_y,
            pr=c.pr / self.radius_scale,
            ix=(c.ix + self.pad_x) / self.scale_x,
            iy=(c.iy + self.pad_y) / self.scale_y,
            ir=c.ir / self.radius_scale,
        )

    def to_source(self, c):
        return CircleParams(
            px=c.px * self.scale_x - self.pad_x,
            py=c.py * self.scale_y - self.pad_y,
            pr=c.pr * self.radius_scale,
            ix=c.ix * self.scale_x - self.pad_x,
            iy=c.iy * self.scale_y - self.pad_y,
            ir=c.ir * self.radius_scale,
        )


def _plan(width, height, target_width, target_height):
    if target_width <= 0 or target_height <= 0:
        raise InvalidImage('target dimensions must be positive')
    if width * target_height < height * target_width:
        padded_w = int(round(height * target_width / target_height))
        padded_h = height
    else:
        padded_w = width
        padded_h = int(round(width * target_height / target_width))
    return FrameTransform(
        pad_x=(padded_w - width) // 2,
        pad_y=(padded_h - height) // 2,
        scale_x=padded_w / target_width,
        scale_y=padded_h / target_height,
    ), (padded_h, padded_w)


def _pad(values, transform, padded_shape):
    out = np.zeros(padded_shape, dtype=values.dtype)
    height, width = values.shape
    out[transform.pad_y:transform.pad_y + height,
        transform.pad_x:transform.pad_x + width] = values
    return out


def _target_grid(transform, target_width, target_height):
    cols = np.arange(target_width, dtype=np.float64) * transform.scale_x
    rows = np.arange(target_height, dtype=np.float64) * transform.scale_y
    return np.meshgrid(cols, rows)


def preprocess_image(raw, target_width, target_height):
    """Pad ``raw`` with zeros to the target aspect ratio, then rescale.

    Returns the rescaled image and the ``FrameTransform`` relating the two
    coordinate frames.
    """
    if raw.width == 0 or raw.height == 0:
        raise InvalidImage('image has zero area')
    transform, padded_shape = _plan(raw.width, raw.height,
                                    target_width, target_height)
    padded = _pad(raw.pixels, transform, padded_shape)
    x, y = _target_grid(transform, target_width, target_height)
    pixels = sampling.bilinear(padded, x, y)
    logger.debug('preprocessed %dx%d -> %dx%d (%s)', raw.width, raw.height,
                 target_width, target_height, transform)
    return GrayImage(np.clip(pixels, 0.0, 1.0)), transform


def preprocess_mask(mask, target_width, target_height):
    """Apply the ``preprocess_image`` mapping to a mask (nearest neighbor)"""
    transform, padded_shape = _plan(mask.width, mask.height,
                                    target_width, target_height)
    padded = _pad(mask.bits, transform, padded_shape)
    x, y = _target_grid(transform, target_width, target_height)
    return BinaryMask(sampling.nearest(padded, x, y)), transform
