"""Binarized filter responses of normalized irises"""
import numpy as np
from scipy import ndimage

from biotemplates.schema import BinaryCodeTemplate
from core.exceptions import KernelTooLarge


def _pad(polar, radius):
    """Clamp along the radial axis, wrap along the angular axis"""
    padded = np.pad(polar, ((radius, radius), (0, 0)), mode='edge')
    return np.pad(padded, ((0, 0), (radius, radius)), mode='wrap')


def _crop(values, radius):
    if radius == 0:
        return values
    return values[radius:-radius, radius:-radius]


def filter_responses(polar_image, bank):
    """Cross-correlation of every kernel with the polar image, (k, R, A)"""
    radius = bank.s // 2
    padded = _pad(polar_image, radius)
    return np.stack([
        _crop(ndimage.correlate(padded, kernel, mode='constant'), radius)
        for kernel in bank.weights
    ])


def encode(normalized, bank):
    """Binary code: a bit is set where the response is strictly positive.

    A bit is valid only when every pixel under the kernel footprint is
    unoccluded.
    """
    rows, cols = normalized.polar_image.shape
    if bank.s > min(rows, cols):
        raise KernelTooLarge(
            f'{bank.s}x{bank.s} kernel does not fit a {rows}x{cols} iris'
        )
    bits = filter_responses(normalized.polar_image, bank) > 0
    radius = bank.s // 2
    eroded = ndimage.binary_erosion(
        _pad(normalized.polar_mask, radius),
        structure=np.ones((bank.s, bank.s), dtype=bool),
        border_value=1,
    )
    return BinaryCodeTemplate(bits, _crop(eroded, radius))
