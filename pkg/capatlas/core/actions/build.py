"""
Module that fills the atlas cache with the representative caps.
"""

from capatlas.atlas.cache import ENTRIES, Atlas
from capatlas.models.exceptions import ConfigurationException


def build(only, threads, log):
    """
    Builds every atlas entry (or only one with its dependencies) that is not cached yet.
    @param only: entry name or None
    @param threads: worker threads
    @param log:
    @return: exit state
    """
    if only and only not in ENTRIES:
        raise ConfigurationException(f"Unknown atlas entry '{only}', expected one of {sorted(ENTRIES)}.")
    caps = Atlas(threads=threads, log=log).build_all(only)
    for name, cap in caps.items():
        log.log(42, f"{name}: {cap.size}-cap of dimension {cap.dimension}")
    return 0
