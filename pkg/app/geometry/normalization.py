"""Daugman rubber-sheet unwrapping of the iris annulus"""
from dataclasses import dataclass

import numpy as np

from core.exceptions import InvalidGeometry
from geometry import sampling
from geometry.circles import quality_gate

MIN_RADIAL_RES = 2
MIN_ANGULAR_RES = 4


@dataclass(frozen=True, eq=False)
class NormalizedIris:
    """Polar image and occlusion mask, shape (radial_res, angular_res).

    Row 0 lies on the pupil boundary, the last row on the iris boundary.
    """
    polar_image: np.ndarray
    polar_mask: np.ndarray

    def __post_init__(self):
        image = np.asarray(self.polar_image, dtype=np.float64)
        mask = np.asarray(self.polar_mask, dtype=bool)
        if image.ndim != 2 or image.shape != mask.shape:
            raise InvalidGeometry('polar image and mask shapes differ')
        object.__setattr__(self, 'polar_image', image)
        object.__setattr__(self, 'polar_mask', mask)

    @property
    def radial_res(self):
        return self.polar_image.shape[0]

    @property
    def angular_res(self):
        return self.polar_image.shape[1]


def sample_points(c, radial_res, angular_res):
    """Cartesian (x, y) grids of the rubber-sheet sample points"""
    theta = 2.0 * np.pi * np.arange(angular_res) / angular_res
    t = (np.arange(radial_res) / (radial_res - 1))[:, np.newaxis]
    pupil_x = c.px + c.pr * np.cos(theta)
    pupil_y = c.py + c.pr * np.sin(theta)
    iris_x = c.ix + c.ir * np.cos(theta)
    iris_y = c.iy + c.ir * np.sin(theta)
    x = (1.0 - t) * pupil_x + t * iris_x
    y = (1.0 - t) * pupil_y + t * iris_y
    return x, y


def rubber_sheet(img, c, mask=None, radial_res=64, angular_res=512):
    """Unwrap the annulus between the pupil and iris circles.

    Column ``a`` samples angle 2*pi*a/angular_res, row ``r`` the fraction
    r/(radial_res-1) of the way from the pupil to the iris boundary.
    Intensities are bilinear, the mask nearest-neighbor; points outside the
    image read as intensity 0 and occluded.
    """
    if radial_res < MIN_RADIAL_RES or angular_res < MIN_ANGULAR_RES:
        raise InvalidGeometry(
            f'polar resolution {radial_res}x{angular_res} is too small'
        )
    verdict = quality_gate(c)
    if not verdict.accepted:
        raise InvalidGeometry(f'geometry rejected: {verdict.describe()}')
    if mask is not None and mask.bits.shape != img.pixels.shape:
        raise InvalidGeometry('mask and image shapes differ')

    x, y = sample_points(c, radial_res, angular_res)
    valid = sampling.inside(img.pixels.shape, x, y)
    polar_image = np.where(valid, sampling.bilinear(img.pixels, x, y), 0.0)
    if mask is None:
        polar_mask = valid
    else:
        polar_mask = valid & sampling.nearest(mask.bits, x, y)
    return NormalizedIris(np.clip(polar_image, 0.0, 1.0), polar_mask)
