"""Binary and grayscale morphology used by crypt pipelines"""
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from skimage.morphology import reconstruction

from biotemplates.schema import CryptMaskTemplate
from core.exceptions import InvalidMarker
from geometry.rasters import GrayImage

STRUCTURES = {
    4: ndimage.generate_binary_structure(2, 1),
    8: ndimage.generate_binary_structure(2, 2),
}


@dataclass(frozen=True, eq=False)
class LabeledMask:
    """Component labels (0 = background) numbered in raster order"""
    labels: np.ndarray
    count: int

    def sizes(self):
        """Pixel count per label, index 0 being the background"""
        return np.bincount(self.labels.ravel(), minlength=self.count + 1)


def _structure(connectivity):
    try:
        return STRUCTURES[connectivity]
    except KeyError:
        raise ValueError(f'connectivity must be 4 or 8, got {connectivity}')


def connected_components(mask, connectivity=8):
    labels, count = ndimage.label(mask.cells,
                                  structure=_structure(connectivity))
    # renumber by first occurrence in raster order
    flat = labels.ravel()
    present, first = np.unique(flat, return_index=True)
    order = present[1:][np.argsort(first[1:])] if present[0] == 0 \
        else present[np.argsort(first)]
    remap = np.zeros(count + 1, dtype=np.int64)
    remap[order] = np.arange(1, order.size + 1)
    return LabeledMask(remap[labels], int(order.size))


def area_open(mask, min_area, connectivity=8):
    """Drop components with fewer than ``min_area`` pixels"""
    if min_area < 1:
        raise ValueError('min_area must be positive')
    labeled = connected_components(mask, connectivity)
    keep = labeled.sizes() >= min_area
    keep[0] = False
    return CryptMaskTemplate(keep[labeled.labels])


def fill_holes(mask):
    """Set background not 4-connected to the border"""
    return CryptMaskTemplate(
        ndimage.binary_fill_holes(mask.cells, structure=STRUCTURES[4])
    )


def morph_reconstruct(marker, mask_img):
    """Reconstruction by dilation of ``marker`` under ``mask_img``"""
    if marker.pixels.shape != mask_img.pixels.shape:
        raise InvalidMarker('marker and mask differ in shape')
    if np.any(marker.pixels > mask_img.pixels):
        raise InvalidMarker('marker exceeds mask')
    rebuilt = reconstruction(marker.pixels, mask_img.pixels,
                             method='dilation', footprint=np.ones((3, 3)))
    return GrayImage(rebuilt)
