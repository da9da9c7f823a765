import os
import time
import unittest

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import KernelTooLarge
from geometry.circles import CircleParams
from geometry.normalization import NormalizedIris, rubber_sheet
from geometry.preprocessing import preprocess_image, preprocess_mask
from geometry.rasters import BinaryMask, GrayImage
from hdbif.encoding import encode, filter_responses
from hdbif.filters import FilterBank, default_filter_bank

PERF = os.environ.get('IRIS_PERF_TESTS') == '1'


def sample_iris(pixels, mask=None):
    if mask is None:
        mask = np.ones(pixels.shape, dtype=bool)
    return NormalizedIris(pixels, mask)


def horizontal_gradient_bank():
    kernel = np.zeros((3, 3))
    kernel[1] = (-1.0, 0.0, 1.0)
    return FilterBank(kernel[np.newaxis])


def naive_responses(image, bank):
    """Cross-correlation with clamped rows and wrapped columns, per pixel"""
    rows, cols = image.shape
    half = bank.s // 2
    out = np.zeros((bank.k, rows, cols))
    for f, kernel in enumerate(bank.weights):
        for r in range(rows):
            for c in range(cols):
                total = 0.0
                for dr in range(-half, half + 1):
                    for dc in range(-half, half + 1):
                        rr = min(max(r + dr, 0), rows - 1)
                        cc = (c + dc) % cols
                        total += kernel[dr + half, dc + half] * image[rr, cc]
                out[f, r, c] = total
    return out


class EncodeTests(SimpleTestCase):
    """Test binarized filter responses"""

    def test_step_edge(self):
        """Test that a rising step sets the two bits straddling it"""
        pixels = np.zeros((8, 16))
        pixels[:, 8:] = 1.0

        code = encode(sample_iris(pixels), horizontal_gradient_bank())

        expected = np.zeros((1, 8, 16), dtype=bool)
        expected[:, :, 7:9] = True
        np.testing.assert_array_equal(code.bits, expected)
        self.assertTrue(code.occlusion.all())

    def test_responses_match_naive_loop(self):
        """Test the filter responses against a per-pixel loop"""
        rng = np.random.default_rng(11)
        image = rng.random((6, 12))
        bank = default_filter_bank(2, 5, seed=5)

        np.testing.assert_allclose(filter_responses(image, bank),
                                   naive_responses(image, bank), atol=1e-12)

    def test_occlusion_eroded_by_footprint(self):
        """Test that a hidden pixel invalidates every kernel covering it"""
        mask = np.ones((8, 16), dtype=bool)
        mask[4, 5] = False

        code = encode(sample_iris(np.zeros((8, 16)), mask),
                      horizontal_gradient_bank())

        expected = np.ones((8, 16), dtype=bool)
        expected[3:6, 4:7] = False
        np.testing.assert_array_equal(code.occlusion, expected)

    def test_occlusion_wraps_around(self):
        """Test that the angular axis wraps for occlusion too"""
        mask = np.ones((8, 16), dtype=bool)
        mask[0, 0] = False

        code = encode(sample_iris(np.zeros((8, 16)), mask),
                      horizontal_gradient_bank())

        hidden = {(int(r), int(c)) for r, c in np.argwhere(~code.occlusion)}
        self.assertEqual(hidden, {(0, 15), (0, 0), (0, 1),
                                  (1, 15), (1, 0), (1, 1)})

    def test_code_shape(self):
        """Test that codes have one plane per kernel"""
        code = encode(sample_iris(np.zeros((16, 64))),
                      default_filter_bank(7, 9))

        self.assertEqual(code.shape, (7, 16, 64))
        self.assertFalse(code.bits.any())

    def test_kernel_too_large(self):
        """Test that kernels larger than the iris are refused"""
        with self.assertRaises(KernelTooLarge):
            encode(sample_iris(np.zeros((8, 16))), default_filter_bank(1, 9))


@unittest.skipUnless(PERF, 'set IRIS_PERF_TESTS=1 to run')
class EncodeSpeedTests(SimpleTestCase):
    """Test the per-image cost of the encoding pipeline"""

    def test_vga_eye(self):
        """Test preprocessing, unwrapping and encoding a 640x480 eye"""
        rng = np.random.default_rng(30)
        raw = GrayImage(rng.random((480, 640)))
        mask = BinaryMask(np.ones((480, 640), dtype=bool))
        circles = CircleParams(322, 238, 45, 320, 240, 120)
        bank = default_filter_bank()

        started = time.perf_counter()
        image, transform = preprocess_image(raw, 640, 480)
        flags, _ = preprocess_mask(mask, 640, 480)
        normalized = rubber_sheet(image, transform.to_target(circles), flags)
        code = encode(normalized, bank)
        elapsed = time.perf_counter() - started

        self.assertEqual(code.shape, (7, 64, 512))
        self.assertLess(elapsed, 1.5)
