"""
Contains the static variable __version__ which holds the current version number.
https://www.akeeba.com/how-do-version-numbers-work.html
"""

from capatlas.core.utility.paths.basic_path import CONFIG_FOLDER, atlas_root

__version__ = "1.0.0"
RELEASE_DATE = "2026"
PROG_NAME = "capatlas"

MESSAGE = f"""{PROG_NAME} {__version__} ({RELEASE_DATE})
# Configuration Folder
{CONFIG_FOLDER}
# Atlas Root
{atlas_root()}"""
