"""
The atlas: a folder of cap files with a manifest of their hashes, filled on demand by the builders.
"""

import hashlib
import json
import logging
import os

from filelock import FileLock

from capatlas.atlas import builders
from capatlas.atlas import features as atlas_features
from capatlas.core.utility import cap_file
from capatlas.core.utility.paths.basic_path import atlas_root
from capatlas.engine.directions import enumerate_directions, raw_counts
from capatlas.engine.symmetry import canonical_form
from capatlas.models.exceptions import (CacheCorruptionException, CapFileException, ConfigurationException,
                                        MissingDependencyException)

LOG = logging.getLogger("capatlas")

MANIFEST = "manifest.json"
# name -> (dimension, size)
ENTRIES = {"dim3-pyramid": (3, 5), "dim3-tetracentre": (3, 5), "dim3-cube": (3, 8), "dim3-9cap": (3, 9),
           "dim4-20cap": (4, 20), "dim4-882A2": (4, 18), "dim5-45cap": (5, 45), "dim5-delta686": (5, 42),
           "dim6-96cap": (6, 96), "dim6-112cap": (6, 112), "dim5-40cap": (5, 40)}
DEPENDENCIES = {"dim4-882A2": ("dim5-45cap",), "dim5-delta686": ("dim4-20cap",), "dim6-112cap": ("dim5-45cap",),
                "dim6-96cap": ("dim5-45cap", "dim4-882A2"), "dim5-40cap": ("dim6-112cap",)}


def cap_hash(cap):
    """
    sha256 of the cap file text (the sorted point list).
    """
    return hashlib.sha256(cap_file.dumps(cap).encode("UTF-8")).hexdigest()


class AtlasCache:
    """
    <root>/<name>.cap plus <root>/manifest.json. Writes are locked and atomic.
    """

    def __init__(self, root=None, log=LOG):
        self.root = root or atlas_root()
        self.log = log

    @property
    def manifest_path(self):
        return os.path.join(self.root, MANIFEST)

    def path(self, name):
        if name not in ENTRIES:
            raise ConfigurationException(f"Unknown atlas entry '{name}', expected one of {sorted(ENTRIES)}.")
        return os.path.join(self.root, f"{name}.cap")

    def _lock(self):
        os.makedirs(self.root, exist_ok=True)
        return FileLock(os.path.join(self.root, f"{MANIFEST}.lock"))

    def read_manifest(self):
        if not os.path.isfile(self.manifest_path):
            return {}
        with open(self.manifest_path, mode="r", encoding="UTF-8") as manifest_file:
            try:
                return json.load(manifest_file)
            except json.JSONDecodeError as exc:
                raise CacheCorruptionException(f"Manifest {self.manifest_path} is not valid JSON: {exc}") from exc

    def has(self, name):
        return os.path.isfile(self.path(name)) and name in self.read_manifest()

    def store(self, name, cap):
        """
        Writes the cap file and records its hash.
        """
        dimension, size = ENTRIES[name]
        if cap.dimension != dimension or cap.size != size or not cap.is_valid():
            raise CacheCorruptionException(f"Refusing to store {name}: {cap.size}-point set of dimension "
                                           f"{cap.dimension} is not a {size}-cap of dimension {dimension}.")
        with self._lock():
            cap_file.write_cap(self.path(name), cap)
            manifest = self.read_manifest()
            manifest[name] = {"sha256": cap_hash(cap), "dimension": dimension, "size": size}
            temporary = f"{self.manifest_path}.tmp"
            with open(temporary, mode="w", encoding="UTF-8") as manifest_file:
                json.dump(dict(sorted(manifest.items())), manifest_file, indent=2)
            os.replace(temporary, self.manifest_path)
        self.log.info("Stored %s in %s.", name, self.root)

    def load(self, name):
        """
        @param name: atlas entry
        @return: CapSet, verified against the manifest
        """
        path = self.path(name)
        if not os.path.isfile(path):
            raise MissingDependencyException(f"Atlas entry {name} missing in {self.root}.")
        try:
            cap = cap_file.read_cap(path)
        except CapFileException as exc:
            raise CacheCorruptionException(f"{path}: {exc}") from exc
        record = self.read_manifest().get(name)
        if record is None:
            raise CacheCorruptionException(f"Atlas entry {name} is not in the manifest.")
        if record.get("sha256") != cap_hash(cap):
            raise CacheCorruptionException(f"Hash of {path} does not match the manifest.")
        if (cap.dimension, cap.size) != ENTRIES[name]:
            raise CacheCorruptionException(f"{path} holds a {cap.size}-cap of dimension {cap.dimension}.")
        return cap

    def verify(self):
        """
        @return: list of (name, problem) for every stored entry that fails to load
        """
        problems = []
        for name in sorted(self.read_manifest()):
            try:
                self.load(name)
            except (CacheCorruptionException, MissingDependencyException, ConfigurationException) as exc:
                problems.append((name, str(exc)))
        return problems


class Atlas:
    """
    Cached access to the representative caps; missing entries are built with their dependencies.
    """

    def __init__(self, cache=None, build=True, threads=1, log=LOG):
        self.cache = cache or AtlasCache(log=log)
        self.build = build
        self.threads = threads
        self.log = log

    def get(self, name):
        if self.cache.has(name):
            return self.cache.load(name)
        if not self.build:
            raise MissingDependencyException(f"Atlas entry {name} is missing and building is disabled.")
        for dependency in DEPENDENCIES.get(name, ()):
            self.get(dependency)
        self.log.info("Building atlas entry %s.", name)
        for built_name, cap in self._build(name).items():
            self.cache.store(built_name, cap)
        return self.cache.load(name)

    def build_all(self, only=None):
        names = [only] if only else list(ENTRIES)
        return {name: self.get(name) for name in names}

    def ii_direction(self):
        """
        First {18,9,18} direction of the atlas 45-cap whose 18-caps are both 882A2.
        """
        cap45 = self.get("dim5-45cap")
        key = atlas_features.class_key(self.get("dim4-882A2"), self.log)
        directions = enumerate_directions(cap45.dimension, 1)
        for direction, row in zip(directions, raw_counts(cap45.points, cap45.dimension, directions)):
            if sorted(row.tolist()) != [9, 18, 18]:
                continue
            _, parts = atlas_features.reference_fiber(cap45, direction)
            if all(atlas_features.class_key(part, self.log) == key for part in parts):
                return direction
        raise CacheCorruptionException("Atlas 45-cap has no {18,9,18} direction with two 882A2 caps.")

    def _build(self, name):
        """
        @return: dict of entries produced by the builder of name
        """
        match name:
            case "dim3-pyramid" | "dim3-tetracentre":
                classification = builders.classify_dim3_5caps(self.log)
                return {f"dim3-{class_name}": certificate.canonical
                        for class_name, certificate in classification.certificates.items()}
            case "dim3-cube":
                return {name: canonical_form(atlas_features.cube()).canonical}
            case "dim3-9cap":
                return {name: builders.nine_cap(self.log)}
            case "dim4-20cap":
                return {name: builders.twenty_cap(self.log)}
            case "dim5-45cap":
                return {name: builders.build_45cap(builders.build_882A2_candidate(self.log), self.log)}
            case "dim4-882A2":
                return {name: builders.reference_882A2(self.get("dim5-45cap"), self.log)}
            case "dim6-112cap":
                return {name: builders.build_112cap(self.get("dim5-45cap"), self.log)}
            case "dim6-96cap":
                return {name: builders.build_96cap(self.get("dim5-45cap"), self.ii_direction(), self.threads,
                                                   self.log)}
            case "dim5-delta686":
                return {name: builders.build_delta686(self.get("dim4-20cap"), self.log)}
            case "dim5-40cap":
                return {name: builders.extract_40cap(self.get("dim6-112cap"), self.log)}
        raise ConfigurationException(f"Unknown atlas entry '{name}'.")
