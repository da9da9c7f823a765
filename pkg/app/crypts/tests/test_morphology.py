from collections import deque

import numpy as np
from django.test import SimpleTestCase
from scipy import ndimage

from biotemplates.schema import CryptMaskTemplate
from core.exceptions import InvalidMarker
from crypts.morphology import (
    area_open, connected_components, fill_holes, morph_reconstruct,
)
from geometry.rasters import GrayImage

NEIGHBORS = {
    4: ((-1, 0), (1, 0), (0, -1), (0, 1)),
    8: tuple((dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1)
             if (dr, dc) != (0, 0)),
}


def bfs_labels(cells, connectivity):
    """Breadth-first labeling, components numbered in raster order"""
    labels = np.zeros(cells.shape, dtype=np.int64)
    count = 0
    rows, cols = cells.shape
    for start in zip(*np.nonzero(cells)):
        if labels[start]:
            continue
        count += 1
        labels[start] = count
        queue = deque([start])
        while queue:
            r, c = queue.popleft()
            for dr, dc in NEIGHBORS[connectivity]:
                rr, cc = r + dr, c + dc
                if 0 <= rr < rows and 0 <= cc < cols \
                        and cells[rr, cc] and not labels[rr, cc]:
                    labels[rr, cc] = count
                    queue.append((rr, cc))
    return labels, count


def random_cells(seed, count=200, shape=(32, 32)):
    rng = np.random.default_rng(seed)
    return [rng.random(shape) < rng.uniform(0.2, 0.7) for _ in range(count)]


def area_open_oracle(cells, min_area, connectivity):
    labels, count = bfs_labels(cells, connectivity)
    sizes = np.bincount(labels.ravel(), minlength=count + 1)
    return (labels > 0) & (sizes[labels] >= min_area)


def fill_holes_oracle(cells):
    """Background not reached by a 4-connected flood from the border"""
    rows, cols = cells.shape
    reached = np.zeros(cells.shape, dtype=bool)
    queue = deque((r, c) for r in range(rows) for c in range(cols)
                  if (r in (0, rows - 1) or c in (0, cols - 1))
                  and not cells[r, c])
    for start in queue:
        reached[start] = True
    while queue:
        r, c = queue.popleft()
        for dr, dc in NEIGHBORS[4]:
            rr, cc = r + dr, c + dc
            if 0 <= rr < rows and 0 <= cc < cols \
                    and not cells[rr, cc] and not reached[rr, cc]:
                reached[rr, cc] = True
                queue.append((rr, cc))
    return ~reached


def reconstruct_to_fixpoint(marker, mask):
    current = marker.copy()
    while True:
        grown = np.minimum(ndimage.grey_dilation(current, size=(3, 3)), mask)
        if np.array_equal(grown, current):
            return current
        current = grown


class ConnectedComponentsTests(SimpleTestCase):
    """Test component labeling"""

    def test_diagonal_neighbors(self):
        """Test that diagonal pixels join only under 8-connectivity"""
        mask = CryptMaskTemplate(np.eye(3, dtype=bool))

        self.assertEqual(connected_components(mask, 4).count, 3)
        self.assertEqual(connected_components(mask, 8).count, 1)

    def test_against_breadth_first_search(self):
        """Test labels of 200 random masks against a breadth-first labeling"""
        for cells in random_cells(8):
            for connectivity in (4, 8):
                labeled = connected_components(CryptMaskTemplate(cells),
                                               connectivity)
                labels, count = bfs_labels(cells, connectivity)

                self.assertEqual(labeled.count, count)
                np.testing.assert_array_equal(labeled.labels, labels)

    def test_sizes(self):
        """Test per-label pixel counts"""
        cells = np.zeros((4, 6), dtype=bool)
        cells[0, 0:3] = True
        cells[3, 5] = True

        sizes = connected_components(CryptMaskTemplate(cells)).sizes()

        self.assertEqual(sizes.tolist(), [20, 3, 1])

    def test_bad_connectivity(self):
        """Test that only 4 and 8 connectivity are known"""
        with self.assertRaises(ValueError):
            connected_components(CryptMaskTemplate(np.ones((2, 2))), 6)


class AreaOpenTests(SimpleTestCase):
    """Test removal of small components"""

    def test_drops_small_components(self):
        """Test that components under the area threshold vanish"""
        cells = np.zeros((5, 5), dtype=bool)
        cells[0, 0:3] = True
        cells[4, 4] = True

        opened = area_open(CryptMaskTemplate(cells), 2)

        expected = cells.copy()
        expected[4, 4] = False
        np.testing.assert_array_equal(opened.cells, expected)

    def test_connectivity_decides_area(self):
        """Test that a diagonal pair counts as one crypt only with 8-conn"""
        mask = CryptMaskTemplate(np.eye(2, dtype=bool))

        self.assertEqual(area_open(mask, 2, 8).area, 2)
        self.assertEqual(area_open(mask, 2, 4).area, 0)

    def test_against_component_sizes(self):
        """Test 200 random masks against a breadth-first size filter"""
        for index, cells in enumerate(random_cells(10)):
            connectivity = (4, 8)[index % 2]
            min_area = 1 + index % 7

            opened = area_open(CryptMaskTemplate(cells), min_area,
                               connectivity)

            np.testing.assert_array_equal(
                opened.cells,
                area_open_oracle(cells, min_area, connectivity))

    def test_idempotent(self):
        """Test that opening an opened mask changes nothing"""
        for cells in random_cells(11, count=50):
            once = area_open(CryptMaskTemplate(cells), 4)

            np.testing.assert_array_equal(area_open(once, 4).cells,
                                          once.cells)

    def test_min_area_positive(self):
        """Test that a zero threshold is refused"""
        with self.assertRaises(ValueError):
            area_open(CryptMaskTemplate(np.ones((2, 2))), 0)


class FillHolesTests(SimpleTestCase):
    """Test hole filling"""

    def test_enclosed_hole(self):
        """Test that an enclosed hole is filled"""
        cells = np.zeros((5, 5), dtype=bool)
        cells[1:4, 1:4] = True
        cells[2, 2] = False

        filled = fill_holes(CryptMaskTemplate(cells))

        self.assertTrue(filled.cells[2, 2])
        self.assertEqual(filled.area, 9)

    def test_diagonal_gap_still_encloses(self):
        """Test that background escaping only diagonally is a hole"""
        cells = np.zeros((5, 5), dtype=bool)
        cells[1:4, 1:4] = True
        cells[2, 2] = False
        cells[1, 1] = False

        filled = fill_holes(CryptMaskTemplate(cells))

        self.assertTrue(filled.cells[2, 2])
        self.assertFalse(filled.cells[1, 1])

    def test_against_border_flood(self):
        """Test 200 random masks against a flood fill from the border"""
        for cells in random_cells(12):
            filled = fill_holes(CryptMaskTemplate(cells))

            np.testing.assert_array_equal(filled.cells,
                                          fill_holes_oracle(cells))

    def test_idempotent(self):
        """Test that filling a filled mask changes nothing"""
        for cells in random_cells(13, count=50):
            once = fill_holes(CryptMaskTemplate(cells))

            np.testing.assert_array_equal(fill_holes(once).cells,
                                          once.cells)

    def test_open_notch(self):
        """Test that background touching the border stays"""
        cells = np.zeros((5, 5), dtype=bool)
        cells[1:4, 1:4] = True
        cells[2, 1:3] = False

        filled = fill_holes(CryptMaskTemplate(cells))

        np.testing.assert_array_equal(filled.cells, cells)


class ReconstructionTests(SimpleTestCase):
    """Test grayscale reconstruction by dilation"""

    def test_against_iterated_dilation(self):
        """Test against geodesic dilation iterated to its fixpoint"""
        rng = np.random.default_rng(9)
        for _ in range(200):
            mask = rng.random((32, 32))
            marker = mask * (rng.random((32, 32)) < 0.05)

            rebuilt = morph_reconstruct(GrayImage(marker), GrayImage(mask))

            np.testing.assert_allclose(
                rebuilt.pixels, reconstruct_to_fixpoint(marker, mask))

    def test_marker_above_mask(self):
        """Test that a marker exceeding the mask is refused"""
        mask = GrayImage(np.full((3, 3), 0.5))

        with self.assertRaises(InvalidMarker):
            morph_reconstruct(GrayImage(np.full((3, 3), 0.6)), mask)

    def test_shape_mismatch(self):
        """Test that marker and mask must share a shape"""
        with self.assertRaises(InvalidMarker):
            morph_reconstruct(GrayImage(np.zeros((3, 3))),
                              GrayImage(np.zeros((3, 4))))
