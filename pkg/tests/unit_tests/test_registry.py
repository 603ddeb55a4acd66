"""
Module to test the check registry and the runner
"""

import time
from math import comb
from types import SimpleNamespace
from unittest import TestCase
from unittest.mock import Mock, patch

from capatlas.atlas import builders
from capatlas.engine.geometry import CapSet
from capatlas.models.exceptions import MissingDependencyException, UnknownCheckException
from capatlas.models.reports import Expected
from capatlas.models.return_threading import ReturnThread
from capatlas.verify import registry, runner
from capatlas.verify.context import CheckContext
from capatlas.verify.registry import Check

EXPECTED_IDS = {"D-counts", "moments", "atlas-manifest", "L2.2-census", "L2.2-3flats", "L2.3-k1", "L2.3-k2",
                "L2.3-k3", "L2.3-k4", "A882-features", "L2.4", "L2.5a", "L2.5b", "L3.1a", "L3.1b", "L3.1c", "L3.1d",
                "L3.2-design", "P3.6-cases", "P3.6-112cap", "P3.6-96cap", "P-40cap", "P3.7-dir", "T1-delta686",
                "P4.1a-opt1"}


def fake_check(check_id, function, dependencies=(), runtime="fast"):
    return Check(check_id, dependencies, Expected(value=1, provenance="TRIVIAL"), runtime, function)


def plain(value):
    """
    True if value is built from JSON-like data only.
    """
    if isinstance(value, dict):
        return all(isinstance(key, (str, int)) and plain(item) for key, item in value.items())
    if isinstance(value, (list, tuple)):
        return all(plain(item) for item in value)
    return value is None or isinstance(value, (bool, int, float, str))


def fake_profile(segments):
    profile = Mock()
    profile.segments.side_effect = lambda point: segments[point]
    return profile


def fake_placement(index):
    return SimpleNamespace(base=Mock(), image=Mock(), index=index)


class TestRegistry(TestCase):
    """
    Class to test registry lookups and the expected table
    """

    def test_all_ids_registered(self):
        self.assertEqual(EXPECTED_IDS, set(registry.CHECKS))
        for check_id, check in registry.CHECKS.items():
            self.assertEqual(check_id, check.id)
            self.assertIn(check.runtime, registry.RUNTIMES)
            self.assertIn(check.expected.provenance, ("PAPER", "TRIVIAL", "DERIVED"))

    def test_expected_values_are_plain_data(self):
        for check in registry.CHECKS.values():
            self.assertTrue(plain(check.expected.value), check.id)

    def test_run_compares_observed_with_expected(self):
        matching = Check("x", (), Expected(value={"a": [1, 2]}, provenance="TRIVIAL"), "fast",
                         lambda _: ({"a": [1, 2]}, "witness"))
        self.assertEqual((True, {"a": [1, 2]}, "witness"), matching.run(None))
        different = Check("x", (), Expected(value={"a": [1, 2]}, provenance="TRIVIAL"), "fast",
                          lambda _: ({"a": [2, 1]}, None))
        self.assertFalse(different.run(None)[0])

    def test_dependencies_are_atlas_entries(self):
        from capatlas.atlas.cache import ENTRIES  # pylint: disable=import-outside-toplevel
        for check in registry.CHECKS.values():
            self.assertTrue(set(check.dependencies) <= set(ENTRIES), check.id)

    def test_get_check(self):
        self.assertEqual("D-counts", registry.get_check("D-counts").id)
        with self.assertRaises(UnknownCheckException):
            registry.get_check("L9.9")

    def test_checks_up_to(self):
        fast = registry.checks_up_to("fast")
        medium = registry.checks_up_to("medium")
        everything = registry.checks_up_to("long")
        self.assertEqual(sorted(check.id for check in fast), [check.id for check in fast])
        self.assertTrue({check.id for check in fast} <= {check.id for check in medium})
        self.assertEqual(EXPECTED_IDS, {check.id for check in everything})
        self.assertTrue(all(check.runtime == "fast" for check in fast))
        self.assertNotIn("P3.6-96cap", {check.id for check in medium})
        self.assertIn("T1-delta686", {check.id for check in medium})
        with self.assertRaises(UnknownCheckException):
            registry.checks_up_to("forever")

    def test_direction_count_check(self):
        observed, formula = registry.check_direction_counts(None)
        self.assertEqual({"5,1": 121, "6,1": 364, "6,2": 11011}, observed)
        self.assertEqual(observed, formula)
        self.assertTrue(registry.CHECKS["D-counts"].run(None)[0])


class TestRegistryChecks(TestCase):
    """
    Class to test check functions against fake contexts
    """

    def test_overlapping_segments(self):
        disjoint = fake_profile({1: [(10, 20)], 2: [(11, 21)], 3: [(12, 20)]})
        self.assertIsNone(registry.overlapping_segments(disjoint, [1, 2]))
        self.assertEqual((1, 3), registry.overlapping_segments(disjoint, [1, 2, 3]))
        same_level_only = fake_profile({1: [(10, 20)], 2: [(20, 10)]})
        self.assertIsNone(registry.overlapping_segments(same_level_only, [1, 2]))

    def test_disjoint_segments_count(self):
        profile = fake_profile({1: [(10, 20), (13, 23)], 2: [(11, 21)]})
        self.assertFalse(registry._disjoint_segments(profile, [1, 2]))  # pylint: disable=protected-access
        profile = fake_profile({1: [(10, 20), (13, 23)], 2: [(11, 21), (14, 24)]})
        self.assertTrue(registry._disjoint_segments(profile, [1, 2]))  # pylint: disable=protected-access

    def test_placement_cases_require_every_case(self):
        statistics = [(22, 22), (6, 6), (3, 10)]
        profiles = [Mock(**{"statistics.return_value": value}) for value in statistics]
        context = SimpleNamespace(placements45=[fake_placement(index) for index in range(3)])
        with patch("capatlas.verify.registry.midpoint_profile", side_effect=profiles * 2), \
                patch("capatlas.verify.registry.is_translation", return_value=True), \
                patch("capatlas.verify.registry.is_point_reflection", return_value=True):
            observed, witness = registry.check_placement_cases(context)
            passed, _, _ = registry.CHECKS["P3.6-cases"].run(context)
        self.assertEqual(["(22,22)", "(6,6)"], observed["present"])
        self.assertEqual(0, observed["unexpected"])
        self.assertEqual(["(0,45)", "(2,14)"], witness["missing"])
        self.assertEqual({"(22,22)": 1, "(6,6)": 1, "small": 1}, witness["census"])
        self.assertFalse(passed)

    def test_placement_cases_all_present(self):
        statistics = [(0, 45), (22, 22), (6, 6), (2, 14), (0, 0)]
        profiles = [Mock(**{"statistics.return_value": value}) for value in statistics]
        context = SimpleNamespace(placements45=[fake_placement(index) for index in range(5)])
        with patch("capatlas.verify.registry.midpoint_profile", side_effect=profiles), \
                patch("capatlas.verify.registry.is_translation", return_value=True), \
                patch("capatlas.verify.registry.is_point_reflection", return_value=True):
            passed, observed, _ = registry.CHECKS["P3.6-cases"].run(context)
        self.assertTrue(passed)
        self.assertEqual(registry.CHECKS["P3.6-cases"].expected.value, observed)

    def test_option_one_reports_overlap(self):
        placement = fake_placement(7)
        profile = Mock()
        profile.statistics.return_value = (0, 112)
        profile.points_with.side_effect = lambda value: (1, 2) if value == 1 else ()
        profile.segments.side_effect = {1: [(10, 20)], 2: [(10, 21)]}.get
        image = Mock()
        image.points = (1, 2)
        shift = Mock()
        shift.apply.return_value = image
        context = SimpleNamespace(shift_placements112=[placement])
        with patch("capatlas.verify.registry.midpoint_profile", return_value=profile), \
                patch("capatlas.verify.registry.translation_vector", return_value=(1, 0)), \
                patch("capatlas.verify.registry.translation", return_value=shift):
            observed, witness = registry.check_option_one(context)
        self.assertEqual({"placements": 1, "failures": 1}, observed)
        self.assertEqual([[7, "overlap", [1, 2]]], witness["failures"])

    def test_delta686_table_sweeps_all_removals(self):
        calls = []

        def census(_cap):
            calls.append(1)
            return builders.DELTA686_SPECTRUM if len(calls) == 1 else {}

        context = SimpleNamespace(cap=Mock(return_value=Mock()),
                                  cap45=CapSet.from_points(5, range(45), check=False))
        with patch("capatlas.verify.registry.builders.hyperplane_census", side_effect=census):
            passed, observed, witness = registry.CHECKS["T1-delta686"].run(context)
        self.assertEqual(comb(45, 3), observed["removals"])
        self.assertEqual(14190, observed["removals"])
        self.assertEqual(0, observed["collisions"])
        self.assertIsNone(witness)
        self.assertEqual(1 + comb(45, 3), len(calls))
        self.assertTrue(passed)


class TestCheckContext(TestCase):
    """
    Class to test the shared context values
    """

    def test_concurrent_readers_compute_once(self):
        atlas = Mock()

        def slow_get(name):
            time.sleep(0.2)
            return name

        atlas.get.side_effect = slow_get
        context = CheckContext(atlas, 2, Mock())
        threads = [ReturnThread(target=lambda: context.cap882) for _ in range(4)]
        for thread in threads:
            thread.start()
        self.assertEqual(["dim4-882A2"] * 4, [thread.join() for thread in threads])
        atlas.get.assert_called_once_with("dim4-882A2")

    def test_values_are_independent(self):
        atlas = Mock()
        atlas.get.side_effect = lambda name: name
        context = CheckContext(atlas, 1, Mock())
        self.assertEqual("dim4-882A2", context.cap882)
        self.assertEqual("dim5-45cap", context.cap45)
        self.assertEqual("dim4-882A2", context.cap882)
        self.assertEqual(2, atlas.get.call_count)


class TestRunner(TestCase):
    """
    Class to test check execution with fake checks
    """

    def setUp(self):
        self.atlas = Mock()
        self.context = CheckContext(self.atlas, 1, Mock())

    def test_passing_check(self):
        report = runner._execute(fake_check("x", lambda _: (1, None)),  # pylint: disable=protected-access
                                 self.context)
        self.assertTrue(report.passed)
        self.assertEqual(1, report.observed)
        self.assertEqual("TRIVIAL", report.expected.provenance)

    def test_exception_fails_check(self):
        def broken(_):
            raise ValueError("boom")

        report = runner._execute(fake_check("x", broken), self.context)  # pylint: disable=protected-access
        self.assertFalse(report.passed)
        self.assertEqual({"error": "ValueError: boom"}, report.observed)

    def test_missing_dependency_propagates(self):
        def missing(_):
            raise MissingDependencyException("dim5-45cap")

        with self.assertRaises(MissingDependencyException):
            runner._execute(fake_check("x", missing), self.context)  # pylint: disable=protected-access

    def test_run_check_resolves_dependencies(self):
        check = fake_check("x", lambda _: (0, None), dependencies=("dim3-cube", "dim3-9cap"))
        with patch("capatlas.verify.runner.get_check", return_value=check):
            report = runner.run_check("x", atlas=self.atlas, log=Mock())
        self.assertFalse(report.passed)
        self.assertEqual(["dim3-9cap", "dim3-cube"], [call.args[0] for call in self.atlas.get.call_args_list])

    def test_run_all_sorted_summary(self):
        checks = [fake_check("b", lambda _: (1, None)), fake_check("a", lambda _: (0, None)),
                  fake_check("c", lambda _: (1, None))]
        with patch("capatlas.verify.runner.checks_up_to", return_value=checks):
            summary = runner.run_all("fast", atlas=self.atlas, threads=2, log=Mock())
        self.assertEqual(["a", "b", "c"], [report.id for report in summary.reports])
        self.assertEqual(2, summary.passed)
        self.assertEqual(1, summary.failed)
        self.assertEqual("fast", summary.maxRuntime)
