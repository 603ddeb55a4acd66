"""
Modul to test startup
"""

import logging
from unittest import TestCase
from unittest.mock import patch

from click.testing import CliRunner

from capatlas.core import startup


class TestStartup(TestCase):
    """
    Class to test startup
    """

    @patch("capatlas.core.actions.build.build")
    def test_build(self, mock_build):
        mock_build.return_value = 42
        self.assertEqual(42, startup.run_action("build", {"only": "dim3-cube", "threads": 3}))
        mock_build.assert_called_with("dim3-cube", 3, startup.LOG)

    @patch("capatlas.core.actions.analyze.analyze")
    def test_analyze(self, mock_analyze):
        mock_analyze.return_value = 42
        self.assertEqual(42, startup.run_action("analyze", {"cap": "a.cap", "codim": 2, "features": True}))
        mock_analyze.assert_called_with("a.cap", 2, True, 1, startup.LOG)

    @patch("capatlas.core.actions.canon.canon")
    def test_canon(self, mock_canon):
        mock_canon.return_value = 42
        self.assertEqual(42, startup.run_action("canon", {"first": "a.cap", "second": "b.cap"}))
        mock_canon.assert_called_with("a.cap", "b.cap", startup.LOG)

    @patch("capatlas.core.startup.load_job")
    @patch("capatlas.core.actions.run_search.search")
    def test_search(self, mock_search, mock_load_job):
        mock_search.return_value = 42
        mock_load_job.return_value = {"dimension": 3}
        self.assertEqual(42, startup.run_action("search", {"job": "job.yaml", "threads": 2, "checkpoint": "c"}))
        mock_search.assert_called_with({"dimension": 3}, "job.yaml", 2, "c", startup.LOG)

    @patch("capatlas.core.startup.load_job")
    @patch("capatlas.core.actions.placements.placements")
    def test_placements(self, mock_placements, mock_load_job):
        mock_placements.return_value = 42
        mock_load_job.return_value = {"base": "dim3-cube"}
        self.assertEqual(42, startup.run_action("placements", {"job": "job.yaml", "threads": 1}))
        mock_placements.assert_called_with({"base": "dim3-cube"}, "job.yaml", 1, startup.LOG)

    @patch("capatlas.core.actions.verify.verify")
    def test_verify(self, mock_verify):
        mock_verify.return_value = 42
        self.assertEqual(42, startup.run_action("verify", {"check_id": "D-counts", "no_build": True}))
        mock_verify.assert_called_with("D-counts", False, "medium", None, False, 1, startup.LOG)

    @patch("capatlas.core.actions.build.build")
    def test_exception_exits_with_two(self, mock_build):
        mock_build.side_effect = RuntimeError("broken")
        with self.assertLogs("capatlas", level="ERROR"):
            self.assertEqual(2, startup.run_action("build", {}))

    def test_unknown_action(self):
        self.assertEqual(2, startup.run_action("deploy", {}))

    def test_expand_path(self):
        self.assertEqual("/tmp/job.yaml", startup.expand_path("/tmp/job.yaml"))
        self.assertTrue(startup.expand_path("job-that-does-not-exist.yaml").startswith(startup.CONFIG_FOLDER))

    def test_verify_needs_exactly_one_selection(self):
        runner = CliRunner()
        with patch("capatlas.core.startup.run_action") as mock_run_action, \
                patch("logging.FileHandler", return_value=logging.NullHandler()):
            result = runner.invoke(startup.main, ["verify"])
            self.assertEqual(2, result.exit_code)
            result = runner.invoke(startup.main, ["verify", "--all", "--id", "D-counts"])
            self.assertEqual(2, result.exit_code)
            mock_run_action.assert_not_called()

    def test_verify_command(self):
        runner = CliRunner()
        with patch("capatlas.core.startup.run_action", return_value=0) as mock_run_action, \
                patch("logging.FileHandler", return_value=logging.NullHandler()):
            result = runner.invoke(startup.main, ["-t", "2", "verify", "--all", "--max-runtime", "fast"])
        self.assertEqual(0, result.exit_code)
        action, options = mock_run_action.call_args.args
        self.assertEqual("verify", action)
        self.assertEqual(2, options["threads"])
        self.assertEqual("fast", options["max_runtime"])
        self.assertTrue(options["run_all"])
