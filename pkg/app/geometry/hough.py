"""Circle fitting on segmentation masks with the circular Hough transform"""
import logging
from dataclasses import dataclass

import numpy as np
from django.conf import settings
from scipy import ndimage
from skimage.transform import hough_circle

from core.exceptions import EmptyMask
from geometry.circles import CircleParams

logger = logging.getLogger(__name__)

CROSS = ndimage.generate_binary_structure(2, 1)
# radii evaluated per accumulator block
RADIUS_BLOCK = 8


@dataclass(frozen=True)
class CircleFit:
    params: CircleParams
    # True when no pupil hole was found and the pupil circle is a fallback
    degenerate: bool = False


def _boundaries(bits):
    """Outer and inner boundary pixels of an (annular) mask"""
    padded = np.pad(bits, 1, constant_values=False)
    filled = ndimage.binary_fill_holes(padded)
    outside = ndimage.binary_dilation(~filled, structure=CROSS)
    holes = ndimage.binary_dilation(filled & ~padded, structure=CROSS)
    outer = filled & outside
    inner = padded & holes
    return outer[1:-1, 1:-1], inner[1:-1, 1:-1]


def strongest_circle(edges, min_radius, max_radius):
    """(cx, cy, r) with the most normalized votes.

    Votes are compared over radius blocks in ascending order and the first
    maximum wins, so ties go to the smaller radius, then smaller cy, then
    smaller cx.
    """
    best_votes, best = -np.inf, None
    radii = np.arange(min_radius, max_radius + 1)
    for start in range(0, radii.size, RADIUS_BLOCK):
        block = radii[start:start + RADIUS_BLOCK]
        accumulator = hough_circle(edges.astype(np.uint8), block,
                                   normalize=True)
        flat = int(np.argmax(accumulator))
        votes = accumulator.flat[flat]
        if votes > best_votes:
            r_index, cy, cx = np.unravel_index(flat, accumulator.shape)
            best_votes, best = votes, (int(cx), int(cy), int(block[r_index]))
    return best


def fit_circles_hough(mask):
    """Fit the pupil (inner) and iris (outer) boundary circles of a mask"""
    bits = mask.bits
    if not bits.any():
        raise EmptyMask('mask contains no iris pixels')

    min_radius = settings.IRIS_HOUGH_MIN_RADIUS
    max_radius = max(min_radius, min(mask.width, mask.height) // 2)
    outer, inner = _boundaries(bits)

    ix, iy, ir = strongest_circle(outer, min_radius, max_radius)
    if inner.any():
        px, py, pr = strongest_circle(inner, min_radius, max_radius)
        return CircleFit(CircleParams(px, py, pr, ix, iy, ir))

    pr = settings.IRIS_HOUGH_DEGENERATE_PUPIL_RATIO * ir
    logger.warning('no pupil boundary in mask, falling back to '
                   'pr=%.1f at the iris center', pr)
    return CircleFit(CircleParams(ix, iy, pr, ix, iy, ir), degenerate=True)
