"""
Module to test geometry
"""

import itertools
import random
from unittest import TestCase

from capatlas.engine import geometry
from capatlas.engine.geometry import AffineMap, CapSet, Fibration
from capatlas.models.exceptions import DimensionMismatchException, GeometryException

SQUARE = (0, 1, 3, 4)
CUBE = tuple(geometry.index_of(coords) for coords in itertools.product((1, 2), repeat=3))


class TestGeometry(TestCase):
    """
    Class to test points, caps, affine maps and fibrations
    """

    def test_index_encoding(self):
        self.assertEqual(0, geometry.index_of((0, 0, 0)))
        self.assertEqual(9, geometry.index_of((1, 0, 0)))
        self.assertEqual((1, 0, 2), geometry.coords_of(11, 3))
        for point in range(27):
            self.assertEqual(point, geometry.index_of(geometry.coords_of(point, 3)))

    def test_third_on_line(self):
        self.assertEqual(2, geometry.third_on_line(0, 1, 2))
        self.assertEqual(8, geometry.third_on_line(0, 4, 2))
        with self.assertRaises(GeometryException):
            geometry.third_on_line(3, 3, 2)
        with self.assertRaises(DimensionMismatchException):
            geometry.third_on_line(0, 9, 2)

    def test_third_points_without_table(self):
        first, second = [5, 100, 700], [17, 3, 42]
        expected = [geometry.third_on_line(p, q, 6) for p, q in zip(first, second)]
        self.assertEqual(expected, geometry.third_points(first, second, 6).tolist())

    def test_is_cap(self):
        self.assertTrue(geometry.is_cap(SQUARE, 2))
        self.assertFalse(geometry.is_cap((0, 1, 2), 2))
        self.assertTrue(geometry.is_cap(CUBE, 3))
        self.assertTrue(geometry.is_cap((), 3))

    def test_is_cap_agrees_with_brute_force(self):
        rng = random.Random(3)
        for _ in range(200):
            points = rng.sample(range(27), rng.randrange(1, 9))
            self.assertEqual(geometry.brute_force_is_cap(points, 3), geometry.is_cap(points, 3))

    def test_from_points(self):
        cap = CapSet.from_points(2, SQUARE)
        self.assertEqual(SQUARE, cap.points)
        self.assertEqual(4, cap.size)
        self.assertIn(3, cap)
        self.assertNotIn(2, cap)
        with self.assertRaises(GeometryException):
            CapSet.from_points(2, (0, 1, 2))
        self.assertEqual(3, CapSet.from_points(2, (0, 1, 2), check=False).size)

    def test_with_points(self):
        cap = CapSet.from_points(2, SQUARE)
        self.assertEqual((0, 1, 3), cap.with_points(removed=(4,)).points)
        with self.assertRaises(GeometryException):
            cap.with_points(added=(2,))

    def test_mask_outside_points(self):
        with self.assertRaises(GeometryException):
            CapSet(2, 1 << 9)
        with self.assertRaises(GeometryException):
            CapSet(2, -1)
        self.assertEqual(9, CapSet(2, (1 << 9) - 1).size)

    def test_addable_and_complete(self):
        self.assertTrue(geometry.is_complete(CapSet.from_points(2, SQUARE)))
        line_pair = CapSet.from_points(2, (0, 1))
        self.assertNotIn(2, geometry.addable_points(line_pair))
        self.assertEqual(6, len(geometry.addable_points(line_pair)))
        cube = CapSet.from_points(3, CUBE)
        self.assertFalse(geometry.is_complete(cube))

    def test_affine_hull_dimension(self):
        self.assertEqual(-1, geometry.affine_hull_dimension((), 2))
        self.assertEqual(0, geometry.affine_hull_dimension((5,), 2))
        self.assertEqual(1, geometry.affine_hull_dimension((0, 1), 2))
        self.assertEqual(2, geometry.affine_hull_dimension(SQUARE, 2))
        self.assertEqual(3, geometry.affine_hull_dimension(CUBE, 3))

    def test_affine_map_inverse(self):
        rng = random.Random(11)
        for _ in range(10):
            affine_map = geometry.random_affine_map(3, rng)
            identity = affine_map.compose(affine_map.inverse())
            self.assertEqual(AffineMap.identity(3).permutation.tolist(), identity.permutation.tolist())

    def test_affine_map_preserves_caps(self):
        cube = CapSet.from_points(3, CUBE)
        affine_map = geometry.random_affine_map(3, random.Random(5))
        image = affine_map.apply(cube)
        self.assertEqual(8, image.size)
        self.assertTrue(image.is_valid())
        self.assertEqual(cube, geometry.apply_map(affine_map.inverse(), geometry.apply_map(affine_map, cube)))

    def test_singular_map(self):
        with self.assertRaises(GeometryException):
            AffineMap.create([[1, 1], [2, 2]])

    def test_translation_and_reflection(self):
        self.assertEqual(3, geometry.translation((1, 0)).apply_point(0))
        self.assertEqual(8, geometry.point_reflection(4, 2).apply_point(0))
        self.assertEqual(4, geometry.point_reflection(4, 2).apply_point(4))

    def test_from_permutation(self):
        affine_map = geometry.random_affine_map(3, random.Random(7))
        recovered = AffineMap.from_permutation(affine_map.permutation, 3)
        self.assertEqual(affine_map.permutation.tolist(), recovered.permutation.tolist())

    def test_fibers(self):
        cube = CapSet.from_points(3, CUBE)
        fibration = Fibration(((1, 0, 0),))
        self.assertEqual([0, 4, 4], geometry.fiber_sizes(cube, fibration).tolist())
        parts = geometry.fibers(cube, fibration)
        self.assertEqual({(0,): 0, (1,): 4, (2,): 4}, {label: part.size for label, part in parts.items()})
        embedded = geometry.embed_fiber(parts[(1,)], fibration, 1)
        self.assertEqual({point for point in CUBE if geometry.coords_of(point, 3)[0] == 1}, set(embedded))

    def test_fibration_validation(self):
        with self.assertRaises(GeometryException):
            Fibration(((1, 0, 0), (2, 0, 0)))
        with self.assertRaises(GeometryException):
            Fibration(())
        fibration = Fibration(((1, 1, 0),), (2,))
        self.assertEqual(2, len(fibration.direction_basis))
        self.assertEqual(9, len(fibration.fiber_points(0)))

    def test_flat_points(self):
        self.assertEqual([0, 1, 2], geometry.flat_points(0, [(0, 1)], 2).tolist())
        self.assertEqual(list(range(9)), sorted(geometry.flat_points(4, [(1, 0), (0, 1)], 2).tolist()))
