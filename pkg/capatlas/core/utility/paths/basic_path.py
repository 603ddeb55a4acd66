"""
Module containing the most basic paths. Must stay at the same place relative to root.
"""

import os
from pathlib import Path

RESOURCES = "resources"
# if the relative path from this file to resources is altered, the next line must be adapted or files will not be found.
ROOT_PATH = Path(__file__).absolute().parents[3]
RESOURCES_PATH = os.path.join(ROOT_PATH, RESOURCES)
TEST_RESOURCES_PATH = os.path.join(RESOURCES_PATH, "tests")
DEFAULTS_PATH = os.path.join(RESOURCES_PATH, "defaults")
DEFAULT_JOB_PATH = os.path.join(DEFAULTS_PATH, "default_job.yaml")

CONFIG_PATH = os.path.expanduser("~/.config")
CONFIG_FOLDER = os.path.join(CONFIG_PATH, "capatlas")
ENFORCED_CONFIG_PATH = os.path.join(CONFIG_FOLDER, "enforced_capatlas.yaml")
DEFAULT_CONFIG_PATH = os.path.join(CONFIG_FOLDER, "default_capatlas.yaml")

ATLAS_ENVIRONMENT_VARIABLE = "CAPATLAS_ATLAS"
DEFAULT_ATLAS_ROOT = "atlas"
LONG_TESTS_ENVIRONMENT_VARIABLE = "CAPATLAS_LONG_TESTS"


def atlas_root():
    """
    Atlas cache folder: $CAPATLAS_ATLAS or ./atlas
    """
    return os.path.abspath(os.path.expanduser(os.environ.get(ATLAS_ENVIRONMENT_VARIABLE, DEFAULT_ATLAS_ROOT)))
