"""
Runs the unit tests next to this file, and the integration tests as well when CAPATLAS_LONG_TESTS=1.
Exits with 1 if anything failed.
"""

import logging
import os
import sys
import unittest

from capatlas.core.utility.paths.basic_path import LONG_TESTS_ENVIRONMENT_VARIABLE

HERE = os.path.dirname(os.path.abspath(__file__))
TOP = os.path.dirname(os.path.dirname(HERE))


def collect():
    loader = unittest.TestLoader()
    suite = loader.discover(start_dir=HERE, pattern="test_*.py", top_level_dir=TOP)
    if os.environ.get(LONG_TESTS_ENVIRONMENT_VARIABLE) == "1":
        suite.addTests(loader.discover(start_dir=os.path.join(TOP, "tests", "integration"), pattern="test_*.py",
                                       top_level_dir=TOP))
    return suite


if __name__ == '__main__':
    logging.getLogger("capatlas").setLevel(logging.CRITICAL)
    result = unittest.TextTestRunner(verbosity=2).run(collect())
    sys.exit(0 if result.wasSuccessful() else 1)
