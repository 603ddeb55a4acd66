"""
Module to test the atlas cache
"""

import json
import os
import tempfile
from unittest import TestCase
from unittest.mock import patch

from capatlas.atlas import cache as atlas_cache
from capatlas.atlas import features
from capatlas.atlas.cache import Atlas, AtlasCache
from capatlas.core.utility import cap_file
from capatlas.core.utility.paths import basic_path
from capatlas.engine.geometry import CapSet, translation
from capatlas.engine.symmetry import canonical_form
from capatlas.models.exceptions import (CacheCorruptionException, ConfigurationException,
                                        MissingDependencyException)


class TestAtlasCache(TestCase):
    """
    Class to test storing, loading and verifying atlas entries
    """

    def setUp(self):
        self.folder = tempfile.TemporaryDirectory()  # pylint: disable=consider-using-with
        self.cache = AtlasCache(self.folder.name)

    def tearDown(self):
        self.folder.cleanup()

    def test_store_and_load(self):
        self.assertFalse(self.cache.has("dim3-cube"))
        self.cache.store("dim3-cube", features.cube())
        self.assertTrue(self.cache.has("dim3-cube"))
        self.assertEqual(features.cube(), self.cache.load("dim3-cube"))
        manifest = self.cache.read_manifest()
        self.assertEqual(atlas_cache.cap_hash(features.cube()), manifest["dim3-cube"]["sha256"])
        self.assertEqual([], self.cache.verify())

    def test_refuses_wrong_caps(self):
        with self.assertRaises(CacheCorruptionException):
            self.cache.store("dim3-cube", CapSet.from_points(3, (0, 1, 3, 4, 9)))

    def test_unknown_entry(self):
        with self.assertRaises(ConfigurationException):
            self.cache.path("dim9-unknown")

    def test_missing_entry(self):
        with self.assertRaises(MissingDependencyException):
            self.cache.load("dim3-cube")

    def test_hash_mismatch(self):
        self.cache.store("dim3-cube", features.cube())
        other = translation((1, 0, 0)).apply(features.cube())
        cap_file.write_cap(self.cache.path("dim3-cube"), other)
        with self.assertRaises(CacheCorruptionException):
            self.cache.load("dim3-cube")
        self.assertEqual(["dim3-cube"], [name for name, _ in self.cache.verify()])

    def test_malformed_cap_file(self):
        self.cache.store("dim3-cube", features.cube())
        with open(self.cache.path("dim3-cube"), mode="w", encoding="UTF-8") as broken:
            broken.write("capset v1\ndim 3\n")
        with self.assertRaises(CacheCorruptionException):
            self.cache.load("dim3-cube")

    def test_malformed_manifest(self):
        os.makedirs(self.folder.name, exist_ok=True)
        with open(self.cache.manifest_path, mode="w", encoding="UTF-8") as manifest:
            manifest.write("{")
        with self.assertRaises(CacheCorruptionException):
            self.cache.read_manifest()

    def test_manifest_is_sorted_json(self):
        self.cache.store("dim3-cube", features.cube())
        with open(self.cache.manifest_path, mode="r", encoding="UTF-8") as manifest:
            self.assertEqual({"dim3-cube"}, set(json.load(manifest)))

    def test_default_root(self):
        with patch.dict(os.environ, {basic_path.ATLAS_ENVIRONMENT_VARIABLE: self.folder.name}):
            self.assertEqual(os.path.abspath(self.folder.name), AtlasCache().root)


class TestAtlas(TestCase):
    """
    Class to test on-demand building
    """

    def setUp(self):
        self.folder = tempfile.TemporaryDirectory()  # pylint: disable=consider-using-with
        self.cache = AtlasCache(self.folder.name)

    def tearDown(self):
        self.folder.cleanup()

    def test_builds_missing_entry(self):
        cap = Atlas(self.cache).get("dim3-cube")
        self.assertEqual(canonical_form(features.cube()).canonical, cap)
        self.assertTrue(self.cache.has("dim3-cube"))

    def test_no_build(self):
        with self.assertRaises(MissingDependencyException):
            Atlas(self.cache, build=False).get("dim3-cube")

    def test_dependencies_are_built_first(self):
        order = []

        def fake_build(name):
            order.append(name)
            return {name: CapSet(1, 0)}

        atlas = Atlas(self.cache)
        with patch.object(atlas, "_build", side_effect=fake_build), \
                patch.object(self.cache, "store"), \
                patch.object(self.cache, "load", return_value=CapSet(1, 0)):
            atlas.get("dim5-40cap")
        self.assertEqual(["dim5-45cap", "dim6-112cap", "dim5-40cap"], order)
