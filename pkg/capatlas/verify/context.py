"""
Shared, lazily computed inputs of the registry checks.
"""

import functools
import logging
import threading

from capatlas.atlas import builders
from capatlas.atlas import features as atlas_features
from capatlas.engine.directions import directions_with_count
from capatlas.engine.placements import enumerate_placements, recoordinatise
from capatlas.engine.symmetry import automorphisms

LOG = logging.getLogger("capatlas")


def shared(function):
    """
    Property computed once per context; concurrent readers wait for the first computation.
    """
    name = function.__name__

    @functools.wraps(function)
    def getter(self):
        if name not in self.computed:
            with self.lock_for(name):
                if name not in self.computed:
                    self.computed[name] = function(self)
        return self.computed[name]
    return property(getter)


class CheckContext:
    """
    Wraps an Atlas; every derived structure is computed once per context.
    """

    def __init__(self, atlas, threads=1, log=LOG):
        self.atlas = atlas
        self.threads = threads
        self.log = log
        self.computed = {}
        self._locks = {}
        self._guard = threading.Lock()

    def lock_for(self, name):
        with self._guard:
            return self._locks.setdefault(name, threading.Lock())

    def cap(self, name):
        return self.atlas.get(name)

    @shared
    def cap882(self):
        return self.cap("dim4-882A2")

    @shared
    def features882(self):
        return atlas_features.analyze_882A2(self.cap882, self.log)

    @shared
    def cap45(self):
        return self.cap("dim5-45cap")

    @shared
    def features45(self):
        return atlas_features.analyze_45cap(self.cap45, self.cap882, self.log)

    @shared
    def group45(self):
        return automorphisms(self.cap45, self.log)

    @shared
    def cap112(self):
        return self.cap("dim6-112cap")

    @shared
    def functionals112(self):
        """
        Functionals of the {45,45,22} hyperplane directions of the 112-cap.
        """
        return [direction.basis[0] for direction in directions_with_count(self.cap112, 1, (45, 45, 22),
                                                                          self.threads)]

    @shared
    def placements45(self):
        """
        Fiber-aligned placements of the 45-cap over its first 882A2 direction.
        """
        base = builders.placement_base(self.cap45, self.atlas.ii_direction())
        return enumerate_placements(base, "fiber-aligned", threads=self.threads, log=self.log)

    @shared
    def shift_placements112(self):
        """
        Shift placements of the 112-cap with a {45,45,22} functional as first coordinate.
        """
        base, _ = recoordinatise(self.cap112, [self.functionals112[0]])
        return enumerate_placements(base, "shift", threads=self.threads, log=self.log)
