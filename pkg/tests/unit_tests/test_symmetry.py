"""
Module to test canonical forms, isomorphisms and automorphisms
"""

import random
from unittest import TestCase

from capatlas.engine import geometry, symmetry
from capatlas.engine.directions import enumerate_directions
from capatlas.engine.geometry import CapSet
from capatlas.models.exceptions import NotSpanningException

CUBE = CapSet.from_points(3, (13, 14, 16, 17, 22, 23, 25, 26))
PYRAMID = CapSet.from_points(3, (0, 1, 3, 4, 9))
GENERAL_FIVE = CapSet.from_points(3, (0, 1, 3, 9, 13))


class TestSymmetry(TestCase):
    """
    Class to test the symmetry engine against brute force over AGL(3, 3)
    """

    def test_canonical_form_is_invariant(self):
        rng = random.Random(17)
        for cap in (CUBE, PYRAMID, GENERAL_FIVE):
            canonical = symmetry.canonical_form(cap).canonical
            for _ in range(5):
                image = geometry.random_affine_map(3, rng).apply(cap)
                self.assertEqual(canonical, symmetry.canonical_form(image).canonical)

    def test_witness_maps_onto_canonical(self):
        certificate = symmetry.canonical_form(PYRAMID)
        self.assertEqual(certificate.canonical, certificate.witness.apply(PYRAMID))
        self.assertEqual(5, certificate.to_dict()["size"])

    def test_automorphisms_match_brute_force(self):
        for cap in (CUBE, PYRAMID, GENERAL_FIVE):
            group = symmetry.automorphisms(cap)
            self.assertEqual(symmetry.brute_force_automorphism_count(cap), len(group))
            for element in group:
                self.assertEqual(cap, element.apply(cap))

    def test_equivalence_agrees_with_brute_force(self):
        rng = random.Random(23)
        caps = [CUBE, PYRAMID, GENERAL_FIVE] + [geometry.random_affine_map(3, rng).apply(cap)
                                                 for cap in (PYRAMID, GENERAL_FIVE)]
        for first in caps:
            for second in caps:
                if first.size != second.size:
                    continue
                same = symmetry.canonical_form(first).canonical == symmetry.canonical_form(second).canonical
                brute = symmetry.brute_force_canonical(first) == symmetry.brute_force_canonical(second)
                self.assertEqual(brute, same)

    def test_are_isomorphic(self):
        image = geometry.random_affine_map(3, random.Random(29)).apply(GENERAL_FIVE)
        affine_map = symmetry.are_isomorphic(GENERAL_FIVE, image)
        self.assertIsNotNone(affine_map)
        self.assertEqual(image, affine_map.apply(GENERAL_FIVE))
        self.assertIsNone(symmetry.are_isomorphic(PYRAMID, GENERAL_FIVE))
        self.assertIsNone(symmetry.are_isomorphic(PYRAMID, CUBE))

    def test_not_spanning(self):
        with self.assertRaises(NotSpanningException) as context:
            symmetry.canonical_form(CapSet.from_points(3, (0, 1, 3, 4)))
        self.assertEqual(2, context.exception.hull_dimension)

    def test_direction_orbits(self):
        directions = list(enumerate_directions(3, 1))
        group = symmetry.automorphisms(CUBE)
        orbits = symmetry.direction_orbits(CUBE, directions, group)
        self.assertEqual(13, sum(len(orbit) for orbit in orbits))
        for orbit in orbits:
            self.assertEqual(len(group), len(orbit) * symmetry.stabiliser_order(CUBE, orbit[0], group))

    def test_point_colours(self):
        colours = symmetry.point_colours(PYRAMID)
        self.assertEqual(5, len(colours))
        apex = PYRAMID.points.index(9)
        self.assertEqual(1, colours.count(colours[apex]))
