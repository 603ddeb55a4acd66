"""
Module to test cap extension, point replacement and midpoint profiles
"""

import itertools
import os
import tempfile
from unittest import TestCase

from capatlas.engine import geometry, search
from capatlas.engine.geometry import CapSet, Fibration
from capatlas.models.exceptions import ConfigurationException, GeometryException

SQUARE = CapSet.from_points(2, (0, 1, 3, 4))
PAIR = CapSet.from_points(1, (0, 1))


def brute_force_caps(dimension, size):
    return [points for points in itertools.combinations(range(3 ** dimension), size)
            if geometry.brute_force_is_cap(points, dimension)]


class TestExtensionSearch(TestCase):
    """
    Class to test extend_dfs against brute force enumeration
    """

    def test_all_four_caps_of_the_plane(self):
        results, nodes = search.extend_dfs(CapSet.empty(2), 4)
        self.assertEqual(54, len(results))
        self.assertEqual(brute_force_caps(2, 4), [cap.points for cap in results])
        self.assertGreater(nodes, 0)

    def test_three_caps_with_seed(self):
        seed = CapSet.from_points(3, (0, 1))
        results, _ = search.extend_dfs(seed, 3)
        expected = [points for points in brute_force_caps(3, 3) if 0 in points and 1 in points]
        self.assertEqual(expected, [cap.points for cap in results])

    def test_isomorph_free(self):
        results, _ = search.extend_dfs(CapSet.empty(2), 4, isomorph_free=True)
        self.assertEqual(1, len(results))

    def test_limit(self):
        results, _ = search.extend_dfs(CapSet.empty(2), 4, limit=3)
        self.assertEqual(3, len(results))

    def test_unreachable_target(self):
        self.assertEqual(([], 0), search.extend_dfs(CapSet.empty(2), 5))
        self.assertEqual(([], 0), search.extend_dfs(SQUARE, 3))

    def test_seed_is_solution(self):
        results, _ = search.extend_dfs(SQUARE, 4)
        self.assertEqual([SQUARE], results)

    def test_fiber_targets(self):
        fibration = Fibration(((1, 0),))
        results, _ = search.extend_dfs(CapSet.empty(2), 4, fibration, [2, 2, 0])
        expected = [cap.points for cap in search.extend_dfs(CapSet.empty(2), 4)[0]
                    if geometry.fiber_sizes(cap, fibration).tolist() == [2, 2, 0]]
        self.assertTrue(expected)
        self.assertEqual(expected, [cap.points for cap in results])
        mapped, _ = search.extend_dfs(CapSet.empty(2), 4, fibration, {(0,): 2, (1,): 2, (2,): 0})
        self.assertEqual(results, mapped)

    def test_bad_fiber_targets(self):
        with self.assertRaises(GeometryException):
            search.extend_dfs(CapSet.empty(2), 4, Fibration(((1, 0),)), [2, 2])

    def test_threads_do_not_change_results(self):
        single, _ = search.extend_dfs(CapSet.empty(2), 4)
        parallel, _ = search.extend_dfs(CapSet.empty(2), 4, threads=3)
        self.assertEqual(single, parallel)

    def test_checkpoint(self):
        with tempfile.TemporaryDirectory() as folder:
            first, _ = search.extend_dfs(CapSet.empty(2), 4, checkpoint=folder)
            self.assertTrue(os.path.isfile(os.path.join(folder, search.CHECKPOINT_FILE)))
            resumed, _ = search.extend_dfs(CapSet.empty(2), 4, checkpoint=folder)
            self.assertEqual(first, resumed)

    def test_checkpoint_of_other_job(self):
        with tempfile.TemporaryDirectory() as folder:
            search.extend_dfs(CapSet.empty(2), 4, checkpoint=folder)
            with self.assertRaises(ConfigurationException):
                search.extend_dfs(CapSet.empty(2), 3, checkpoint=folder)
            with self.assertRaises(ConfigurationException):
                search.extend_dfs(CapSet.from_points(2, (0,)), 4, checkpoint=folder)

    def test_threads_do_not_change_node_count(self):
        _, single = search.extend_dfs(CapSet.empty(3), 4)
        _, parallel = search.extend_dfs(CapSet.empty(3), 4, threads=4)
        self.assertEqual(single, parallel)


class TestReplacePoints(TestCase):
    """
    Class to test replace_points
    """

    def test_single_point_replacements_of_the_square(self):
        solutions = search.replace_points(SQUARE, 1)
        self.assertEqual(12, len(solutions))
        self.assertEqual(4, sum(1 for removed, added in solutions if removed == added))

    def test_forbid(self):
        self.assertEqual([], search.replace_points(SQUARE, 1, forbid=lambda cap: True))

    def test_stop_after_nontrivial(self):
        solutions = search.replace_points(SQUARE, 1, stop_after_nontrivial=True)
        self.assertNotEqual(solutions[-1][0], solutions[-1][1])

    def test_k_out_of_range(self):
        with self.assertRaises(GeometryException):
            search.replace_points(SQUARE, 5)

    def test_contains_maximal_hyperplane_cap(self):
        self.assertTrue(search.contains_maximal_hyperplane_cap(SQUARE))
        self.assertFalse(search.contains_maximal_hyperplane_cap(CapSet.from_points(3, (0, 4, 17))))


class TestMidpointProfile(TestCase):
    """
    Class to test midpoint profiles and level stacking
    """

    def test_profile_of_a_pair(self):
        profile = search.midpoint_profile(PAIR, PAIR)
        self.assertEqual([1, 1, 2], profile.counts.tolist())
        self.assertEqual({1: 2, 2: 1}, profile.histogram())
        self.assertEqual((2,), profile.points_with(2))
        self.assertEqual([(0, 1), (1, 0)], profile.segments(2))
        self.assertEqual([0, 1], profile.endpoints(2, -1))
        self.assertEqual((0, 3), profile.statistics())
        self.assertEqual((), profile.addable_middle())
        with self.assertRaises(GeometryException):
            profile.endpoints(2, 0)

    def test_profile_total(self):
        profile = search.midpoint_profile(SQUARE, CapSet.from_points(2, (0, 4, 5)))
        self.assertEqual(12, int(profile.counts.sum()))

    def test_stack_levels(self):
        stacked = search.stack_levels({-1: SQUARE, 1: SQUARE, 0: (8,)})
        self.assertEqual(3, stacked.dimension)
        self.assertIn(18, stacked)
        self.assertIn(9 + 4, stacked)
        self.assertIn(8, stacked)
        levels = search.level_caps(stacked)
        self.assertEqual(SQUARE, levels[-1])
        self.assertEqual(SQUARE, levels[1])
        self.assertEqual((8,), levels[0].points)
        with self.assertRaises(GeometryException):
            search.stack_levels({0: (1,)})
