import os
import tempfile

import numpy as np
from django.test import SimpleTestCase
from PIL import Image

from core.exceptions import ImageFormatError, InvalidImage
from geometry.rasters import (
    BinaryMask, GrayImage, read_gray, read_mask, write_gray, write_mask,
)


class RasterTypeTests(SimpleTestCase):
    """Test the raster value types"""

    def test_gray_image_range(self):
        """Test that intensities outside [0, 1] are refused"""
        with self.assertRaises(InvalidImage):
            GrayImage(np.array([[0.0, 1.5]]))
        with self.assertRaises(InvalidImage):
            GrayImage(np.array([[-0.1]]))

    def test_gray_image_shape(self):
        """Test that empty or non-2D rasters are refused"""
        with self.assertRaises(InvalidImage):
            GrayImage(np.zeros((0, 4)))
        with self.assertRaises(InvalidImage):
            GrayImage(np.zeros(4))

    def test_mask_area(self):
        """Test that the mask area counts true pixels"""
        mask = BinaryMask(np.array([[True, False], [True, True]]))

        self.assertEqual(mask.area, 3)
        self.assertEqual((mask.width, mask.height), (2, 2))


class RasterFileTests(SimpleTestCase):
    """Test reading and writing image files"""

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = self._tmp.name

    def tearDown(self):
        self._tmp.cleanup()

    def path(self, name):
        return os.path.join(self.tmp, name)

    def test_color_reduced_to_luminance(self):
        """Test that gray RGB pixels keep their level"""
        rgb = np.full((3, 4, 3), 100, dtype=np.uint8)
        Image.fromarray(rgb).save(self.path('rgb.png'))

        image = read_gray(self.path('rgb.png'))

        self.assertEqual(image.pixels.shape, (3, 4))
        np.testing.assert_array_equal(image.pixels, 100 / 255)

    def test_colored_pixels_weighted(self):
        """Test that color channels are weighted by luminance"""
        rgb = np.zeros((1, 3, 3), dtype=np.uint8)
        rgb[0, 0, 0] = rgb[0, 1, 1] = rgb[0, 2, 2] = 255
        Image.fromarray(rgb).save(self.path('rgb.png'))

        pixels = read_gray(self.path('rgb.png')).pixels[0]
        expected = np.array([0.299, 0.587, 0.114])

        np.testing.assert_allclose(pixels, expected, atol=1 / 255)
        self.assertEqual(int(np.argmax(pixels)), 1)

    def test_sixteen_bit_scaled(self):
        """Test that 16-bit images are scaled by their maximum value"""
        data = np.array([[0, 65535]], dtype=np.uint16)
        Image.fromarray(data).save(self.path('deep.png'))

        pixels = read_gray(self.path('deep.png')).pixels

        np.testing.assert_allclose(pixels, [[0.0, 1.0]])

    def test_pgm_written_and_read(self):
        """Test that 8-bit levels survive a PGM file"""
        levels = np.arange(256, dtype=np.float64).reshape(16, 16) / 255
        write_gray(GrayImage(levels), self.path('levels.pgm'))

        with open(self.path('levels.pgm'), 'rb') as handle:
            self.assertEqual(handle.read(2), b'P5')
        np.testing.assert_array_equal(
            read_gray(self.path('levels.pgm')).pixels, levels)

    def test_mask_threshold(self):
        """Test that gray levels above 127 mark iris pixels"""
        data = np.array([[0, 127, 128, 255]], dtype=np.uint8)
        Image.fromarray(data).save(self.path('mask.png'))

        mask = read_mask(self.path('mask.png'))

        np.testing.assert_array_equal(mask.bits, [[False, False, True, True]])

    def test_mask_written(self):
        """Test that written masks use 0 and 255"""
        bits = np.array([[True, False], [False, True]])
        write_mask(BinaryMask(bits), self.path('mask.pgm'))

        data = np.asarray(Image.open(self.path('mask.pgm')))

        np.testing.assert_array_equal(data, [[255, 0], [0, 255]])

    def test_undecodable_file(self):
        """Test that a non-image file raises ImageFormatError"""
        with open(self.path('junk.png'), 'wb') as handle:
            handle.write(b'not an image')

        with self.assertRaises(ImageFormatError):
            read_gray(self.path('junk.png'))

    def test_missing_file(self):
        """Test that a missing file raises ImageFormatError"""
        with self.assertRaises(ImageFormatError):
            read_mask(self.path('absent.png'))
