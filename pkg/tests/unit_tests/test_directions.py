"""
Module to test directions and spectra
"""

from unittest import TestCase

from capatlas.engine import directions
from capatlas.engine.directions import PointCountMatrix
from capatlas.engine.geometry import AffineMap, CapSet
from capatlas.models.exceptions import GeometryException

SQUARE = CapSet.from_points(2, (0, 1, 3, 4))
CUBE = CapSet.from_points(3, (13, 14, 16, 17, 22, 23, 25, 26))


class TestDirections(TestCase):
    """
    Class to test direction enumeration, point counts and spectra
    """

    def test_direction_count(self):
        self.assertEqual(121, directions.direction_count(5, 1))
        self.assertEqual(364, directions.direction_count(6, 1))
        self.assertEqual(11011, directions.direction_count(6, 2))
        self.assertEqual(13, directions.direction_count(3, 2))

    def test_enumerate_directions(self):
        for dimension, codim in ((2, 1), (3, 1), (3, 2), (4, 2), (4, 3)):
            enumerated = directions.enumerate_directions(dimension, codim)
            self.assertEqual(directions.direction_count(dimension, codim), len(enumerated))
            self.assertEqual(len(enumerated), len(set(enumerated)))
        with self.assertRaises(GeometryException):
            directions.enumerate_directions(3, 4)

    def test_span_direction(self):
        self.assertEqual(directions.span_direction([(2, 0, 1)]), directions.span_direction([(1, 0, 2)]))
        self.assertEqual(directions.span_direction([(1, 1, 0), (0, 1, 0)]),
                         directions.span_direction([(1, 0, 0), (0, 1, 0)]))
        with self.assertRaises(GeometryException):
            directions.span_direction([(1, 1, 0), (2, 2, 0)])

    def test_square_spectrum(self):
        report = directions.spectrum(SQUARE, 1)
        self.assertEqual(4, report.total)
        self.assertEqual(2, report.multiplicity((2, 2, 0)))
        self.assertEqual(2, report.multiplicity((2, 1, 1)))
        self.assertEqual(2, len(directions.directions_with_count(SQUARE, 1, (2, 2, 0))))

    def test_moment_identities(self):
        ok, diagnostic = directions.moment_identities(directions.spectrum(CUBE, 1), CUBE.size, CUBE.dimension)
        self.assertTrue(ok, diagnostic)
        broken = directions.SpectrumReport(2, 1, {PointCountMatrix(1, (4, 0, 0)): 4})
        self.assertFalse(directions.moment_identities(broken, 4, 2)[0])

    def test_point_count_matrix(self):
        matrix = directions.point_count_matrix(CUBE, (1, 0, 0), (0, 1, 0))
        self.assertEqual([[2, 0, 2], [0, 0, 0], [2, 0, 2]], matrix)
        shifted = directions.point_count_matrix(CUBE, (1, 0, 0), (0, 1, 0), (1, 0))
        self.assertEqual([[2, 0, 2], [2, 0, 2], [0, 0, 0]], shifted)

    def test_codim_two_normalisation(self):
        matrix = [[2, 4, 2], [1, 0, 1], [2, 4, 2]]
        transposed = [list(row) for row in zip(*matrix)]
        self.assertEqual(directions.normalise_display_matrix(matrix), directions.normalise_display_matrix(transposed))
        self.assertNotEqual(directions.normalise_display_matrix(matrix),
                            directions.normalise_display_matrix([[3, 3, 3], [2, 0, 2], [2, 2, 1]]))

    def test_direction_point_count_is_normalised(self):
        for direction in directions.enumerate_directions(3, 2):
            key = directions.direction_point_count(CUBE, direction)
            self.assertEqual(2, key.codim)
            self.assertEqual(8, sum(key.entries))

    def test_plane_relabellings(self):
        self.assertEqual((432, 9), directions.plane_relabellings().shape)

    def test_transform_direction(self):
        direction = directions.span_direction([(1, 0, 0)])
        self.assertEqual(direction, directions.transform_direction(direction, AffineMap.identity(3)))
        swap = AffineMap.create([[0, 1, 0], [1, 0, 0], [0, 0, 1]])
        self.assertEqual(directions.span_direction([(0, 1, 0)]), directions.transform_direction(direction, swap))

    def test_contains_functional(self):
        direction = directions.span_direction([(1, 0, 0), (0, 1, 0)])
        self.assertTrue(directions.contains_functional(direction, (2, 1, 0)))
        self.assertFalse(directions.contains_functional(direction, (0, 0, 1)))

    def test_intersection_direction(self):
        first = directions.span_direction([(1, 0, 0)])
        second = directions.span_direction([(0, 1, 0)])
        self.assertEqual(2, directions.intersection_direction(first, second).codim)
