"""Sub-pixel sampling with pixel centers on integer coordinates"""
import numpy as np
from scipy import ndimage

# tolerance for sample points computed a rounding error outside the raster
EDGE_EPS = 1e-9


def inside(shape, x, y):
    height, width = shape
    return (x >= -EDGE_EPS) & (x <= width - 1 + EDGE_EPS) \
        & (y >= -EDGE_EPS) & (y <= height - 1 + EDGE_EPS)


def _sample(values, x, y, order):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    return ndimage.map_coordinates(values, [y.ravel(), x.ravel()],
                                   order=order, mode='nearest',
                                   prefilter=False).reshape(x.shape)


def bilinear(pixels, x, y):
    """Bilinear interpolation, edge-clamped; callers mask with ``inside``"""
    return _sample(np.asarray(pixels, dtype=np.float64), x, y, order=1)


def nearest(flags, x, y):
    """Nearest flag of a boolean raster, edge-clamped"""
    return _sample(np.asarray(flags, dtype=np.uint8), x, y, order=0) > 0
