"""
Builds the 882A2 and the 45-cap and runs the registry checks that need nothing larger. Uses the atlas in
CAPATLAS_ATLAS when it is set, a temporary one otherwise.
"""

import logging
import os
import tempfile
import unittest

from capatlas.atlas.cache import Atlas, AtlasCache
from capatlas.core.utility.paths.basic_path import ATLAS_ENVIRONMENT_VARIABLE
from capatlas.verify import runner
from capatlas.verify.registry import CHECKS

LOG = logging.getLogger("capatlas")

FLAT_CHECKS = ("A882-features", "L2.3-k1", "L2.3-k2", "L2.3-k3", "L2.5a", "L2.5b", "L2.2-census", "L2.2-3flats",
               "L2.4", "L3.2-design", "P3.6-cases")


class TestAtlasChecks(unittest.TestCase):
    """
    Registry checks on the dimension 4 and 5 atlas entries
    """

    @classmethod
    def setUpClass(cls):
        cls.folder = None
        if os.environ.get(ATLAS_ENVIRONMENT_VARIABLE):
            cache = AtlasCache()
        else:
            cls.folder = tempfile.TemporaryDirectory()  # pylint: disable=consider-using-with
            cache = AtlasCache(cls.folder.name)
        cls.atlas = Atlas(cache, threads=4)
        cls.atlas.get("dim5-45cap")

    @classmethod
    def tearDownClass(cls):
        if cls.folder:
            cls.folder.cleanup()

    def test_entries(self):
        self.assertEqual(18, self.atlas.get("dim4-882A2").size)
        self.assertEqual(45, self.atlas.get("dim5-45cap").size)
        self.assertEqual([], self.atlas.cache.verify())

    def test_checks_match_expected_values(self):
        for check_id in FLAT_CHECKS:
            with self.subTest(check=check_id):
                self.assertNotIn("dim6-112cap", CHECKS[check_id].dependencies)
                report = runner.run_check(check_id, atlas=self.atlas, build=False, threads=4, log=LOG)
                self.assertEqual(CHECKS[check_id].expected.value, report.observed)
                self.assertTrue(report.passed)


if __name__ == '__main__':
    unittest.main()
