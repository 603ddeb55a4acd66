"""
Search engines: depth first cap extension with fiber targets, point replacement and midpoint profiles of two caps
in the levels -1 and +1 of a fibration.
"""

import hashlib
import itertools
import json
import logging
import os
import threading
from collections import Counter
from dataclasses import dataclass, field as dataclass_field
from functools import cached_property

import numpy as np
from filelock import FileLock

from capatlas.engine.directions import enumerate_directions, raw_counts
from capatlas.engine.geometry import (KNOWN_MAXIMUM_CAP_SIZES, THIRD_POINT_TABLE_LIMIT, CapSet, addable_points,
                                      affine_hull_dimension, coordinate_table, indices_of, pair_third_points,
                                      point_count, third_point_table, third_points)
from capatlas.models.exceptions import ConfigurationException, DimensionMismatchException, GeometryException
from capatlas.models.return_threading import map_parallel

LOG = logging.getLogger("capatlas")
CHECKPOINT_FILE = "checkpoint.json"


def known_maximum(dimension):
    return KNOWN_MAXIMUM_CAP_SIZES.get(dimension, point_count(dimension))


def target_array(fibration, fiber_targets):
    """
    Fiber targets as an array indexed by label; -1 marks fibers without target.
    @param fibration: Fibration or None
    @param fiber_targets: None, list in label order or mapping from value tuple to size
    """
    if fibration is None:
        return None
    targets = np.full(point_count(fibration.codimension), -1, dtype=np.int64)
    if fiber_targets is None:
        return targets
    if isinstance(fiber_targets, dict):
        for values, size in fiber_targets.items():
            values = tuple(int(value) % 3 for value in values)
            if len(values) != fibration.codimension:
                raise GeometryException(f"Fiber label {values} does not fit codimension {fibration.codimension}.")
            targets[int(np.dot(values, 3 ** np.arange(fibration.codimension - 1, -1, -1)))] = size
        return targets
    if len(fiber_targets) != len(targets):
        raise GeometryException(f"Expected {len(targets)} fiber targets, got {len(fiber_targets)}.")
    targets[:] = fiber_targets
    return targets


@dataclass
class SearchState:
    points: tuple
    allowed: np.ndarray


@dataclass
class ExtensionSearch:
    """
    Include/exclude depth first search for caps of size target containing seed.
    Branching: the targeted fiber with the least slack (allowed points minus missing points), there its smallest
    allowed point; without targets the smallest allowed point overall. Pruning: total and per-fiber capacity, where
    a fiber can still take min(allowed, known maximum - current, target - current) points.
    """
    seed: CapSet
    target: int
    fibration: object = None
    fiber_targets: object = None
    limit: int = 0
    nodes: int = 0
    results: list = dataclass_field(default_factory=list)

    def __post_init__(self):
        if self.fibration is not None and self.fibration.dimension != self.seed.dimension:
            raise DimensionMismatchException("Fibration and seed dimensions differ.")
        self.targets = target_array(self.fibration, self.fiber_targets)
        self.nodes_lock = threading.Lock()

    def fingerprint(self):
        """
        sha256 of the parameters that determine the top level branches and their results.
        """
        job = {"dimension": self.seed.dimension, "seed": list(self.seed.points), "target": self.target,
               "functionals": [list(row) for row in self.fibration.functionals] if self.fibration else None,
               "constants": list(self.fibration.constants) if self.fibration else None,
               "fiberTargets": self.targets.tolist() if self.targets is not None else None, "limit": self.limit}
        return hashlib.sha256(json.dumps(job, sort_keys=True).encode("UTF-8")).hexdigest()

    @cached_property
    def labels(self):
        if self.fibration is None:
            return np.zeros(point_count(self.seed.dimension), dtype=np.int64)
        return self.fibration.labels(np.arange(point_count(self.seed.dimension)))

    @cached_property
    def capacity(self):
        sub_dimension = self.seed.dimension - (self.fibration.codimension if self.fibration else 0)
        fibers = len(self.targets) if self.targets is not None else 1
        capacity = np.full(fibers, known_maximum(sub_dimension), dtype=np.int64)
        if self.targets is not None:
            capacity = np.where(self.targets >= 0, np.minimum(capacity, self.targets), capacity)
        return capacity

    def root(self):
        allowed = np.ones(point_count(self.seed.dimension), dtype=bool)
        allowed[pair_third_points(self.seed.points, self.seed.dimension)] = False
        allowed[list(self.seed.points)] = False
        return SearchState(tuple(self.seed.points), allowed)

    def fiber_counts(self, state):
        fibers = len(self.capacity)
        current = np.bincount(self.labels[list(state.points)], minlength=fibers) if state.points else np.zeros(
            fibers, dtype=np.int64)
        allowed = np.bincount(self.labels[state.allowed], minlength=fibers)
        return current, allowed

    def feasible(self, state):
        current, allowed = self.fiber_counts(state)
        if (current > self.capacity).any():
            return False
        if self.targets is not None:
            targeted = self.targets >= 0
            if (current[targeted] + allowed[targeted] < self.targets[targeted]).any():
                return False
        room = np.minimum(allowed, self.capacity - current).sum()
        return len(state.points) + room >= self.target

    def is_solution(self, state):
        if len(state.points) != self.target:
            return False
        if self.targets is None:
            return True
        current, _ = self.fiber_counts(state)
        targeted = self.targets >= 0
        return bool((current[targeted] == self.targets[targeted]).all())

    def branch_point(self, state):
        """
        Next point to decide, or None if nothing is allowed.
        """
        if not state.allowed.any():
            return None
        if self.targets is not None:
            current, allowed = self.fiber_counts(state)
            missing = np.where(self.targets >= 0, self.targets - current, 0)
            open_fibers = np.flatnonzero((missing > 0) & (allowed > 0))
            if len(open_fibers):
                slack = allowed[open_fibers] - missing[open_fibers]
                fiber = open_fibers[np.argmin(slack)]
                return int(np.flatnonzero(state.allowed & (self.labels == fiber))[0])
            full = (self.targets >= 0) & (missing <= 0)
            usable = state.allowed & ~full[self.labels]
            if not usable.any():
                return None
            return int(np.flatnonzero(usable)[0])
        return int(np.flatnonzero(state.allowed)[0])

    def include(self, state, point):
        allowed = state.allowed.copy()
        allowed[point] = False
        if state.points:
            dimension = self.seed.dimension
            if dimension <= THIRD_POINT_TABLE_LIMIT:
                allowed[third_point_table(dimension)[point, list(state.points)]] = False
            else:
                allowed[third_points([point] * len(state.points), state.points, dimension)] = False
        return SearchState(tuple(sorted(state.points + (point,))), allowed)

    @staticmethod
    def exclude(state, point):
        allowed = state.allowed.copy()
        allowed[point] = False
        return SearchState(state.points, allowed)

    def top_level_branches(self):
        """
        The root split into an ordered list of independent subtrees: the include child of every node on the
        exclude chain, plus the root itself if it is already a solution.
        """
        branches = []
        state = self.root()
        if self.is_solution(state):
            return [("leaf", state)]
        while self.feasible(state):
            point = self.branch_point(state)
            if point is None:
                break
            branches.append(("node", self.include(state, point)))
            state = self.exclude(state, point)
        return branches

    def explore(self, state, limit=0):
        """
        Iterative depth first search below state.
        @return: list of CapSets in search order
        """
        found = []
        visited = 0
        stack = [state]
        while stack:
            state = stack.pop()
            visited += 1
            if self.is_solution(state):
                found.append(CapSet.from_points(self.seed.dimension, state.points, check=False))
                if limit and len(found) >= limit:
                    break
                continue
            if len(state.points) >= self.target or not self.feasible(state):
                continue
            point = self.branch_point(state)
            if point is None:
                continue
            stack.append(self.exclude(state, point))
            stack.append(self.include(state, point))
        with self.nodes_lock:
            self.nodes += visited
        return found

    def run_branch(self, branch):
        kind, state = branch
        if kind == "leaf":
            return [CapSet.from_points(self.seed.dimension, state.points, check=False)]
        return self.explore(state, self.limit)


def _load_checkpoint(path, dimension, fingerprint):
    if not path or not os.path.isfile(path):
        return {}, 0
    with FileLock(f"{path}.lock"):
        with open(path, mode="r", encoding="UTF-8") as checkpoint_file:
            content = json.load(checkpoint_file)
    if content.get("job") != fingerprint:
        raise ConfigurationException(f"Checkpoint {path} was written by a different search job.")
    finished = {int(index): [CapSet.from_points(dimension, points, check=False) for points in caps]
                for index, caps in content.get("finished", {}).items()}
    return finished, content.get("nodes", 0)


def _store_checkpoint(path, finished, nodes, fingerprint):
    temporary = f"{path}.tmp"
    with FileLock(f"{path}.lock"):
        with open(temporary, mode="w", encoding="UTF-8") as checkpoint_file:
            json.dump({"job": fingerprint,
                       "finished": {str(index): [list(cap.points) for cap in caps]
                                    for index, caps in sorted(finished.items())},
                       "nodes": nodes}, checkpoint_file)
        os.replace(temporary, path)


def isomorphism_classes(caps, log=LOG):
    """
    One representative (the first in the given order) per affine class. Caps that do not span are compared by
    mask within their hull dimension.
    """
    from capatlas.engine.symmetry import canonical_form  # pylint: disable=import-outside-toplevel
    seen = set()
    representatives = []
    for cap in caps:
        if affine_hull_dimension(cap.points, cap.dimension) == cap.dimension:
            key = canonical_form(cap, log).canonical.mask
        else:
            key = ("flat", cap.mask)
        if key not in seen:
            seen.add(key)
            representatives.append(cap)
    return representatives


def extend_dfs(seed, target, fibration=None, fiber_targets=None, isomorph_free=False, limit=0, checkpoint=None,
               threads=1, log=LOG):
    """
    All caps of size target that contain seed and meet the fiber targets.
    @param seed: CapSet (may be empty)
    @param target: wanted size
    @param fibration: Fibration or None
    @param fiber_targets: list in label order or mapping from value tuple to size
    @param isomorph_free: keep one cap per affine class
    @param limit: stop after this many results (0: all); results are the first ones in branch order
    @param checkpoint: folder for resumable runs or None
    @param threads: worker threads over the top level branches
    @param log:
    @return: (list of CapSet sorted by point tuple, number of visited nodes)
    """
    if not seed.is_valid():
        raise GeometryException("Seed is not a cap.")
    search = ExtensionSearch(seed, target, fibration, fiber_targets, limit)
    if target < seed.size or target > known_maximum(seed.dimension):
        log.info("Target %s unreachable from a seed of size %s in dimension %s.", target, seed.size, seed.dimension)
        return [], 0
    branches = search.top_level_branches()
    log.info("Search for %s-caps in dimension %s: %s top level branches.", target, seed.dimension, len(branches))
    checkpoint_path = os.path.join(checkpoint, CHECKPOINT_FILE) if checkpoint else None
    if checkpoint:
        os.makedirs(checkpoint, exist_ok=True)
    fingerprint = search.fingerprint()
    finished, nodes = _load_checkpoint(checkpoint_path, seed.dimension, fingerprint)
    if finished:
        log.info("Resuming from checkpoint %s with %s finished branches.", checkpoint_path, len(finished))
    store_lock = threading.Lock()

    def run_chunk(chunk):
        chunk_results = []
        for index, branch in chunk:
            if index in finished:
                caps = finished[index]
            else:
                caps = search.run_branch(branch)
                if checkpoint_path:
                    with store_lock:
                        finished[index] = caps
                        _store_checkpoint(checkpoint_path, finished, search.nodes + nodes, fingerprint)
            chunk_results.append(caps)
            if limit and sum(len(caps) for caps in chunk_results) >= limit:
                break
        return chunk_results

    per_branch = map_parallel(run_chunk, list(enumerate(branches)), threads)
    results = [cap for caps in per_branch for cap in caps]
    if limit:
        results = results[:limit]
    if isomorph_free:
        results = isomorphism_classes(results, log)
    results.sort(key=lambda cap: cap.points)
    log.info("Search visited %s nodes, %s results.", search.nodes + nodes, len(results))
    return results, search.nodes + nodes


def contains_maximal_hyperplane_cap(cap):
    """
    True iff some hyperplane meets cap in a cap of the largest possible size of its dimension
    (for an 18-cap in dimension 4: a 9-cap 3-flat).
    """
    if cap.dimension < 2:
        return False
    counts = raw_counts(cap.points, cap.dimension, enumerate_directions(cap.dimension, 1))
    return bool((counts >= known_maximum(cap.dimension - 1)).any())


def _compatible_subsets(base, candidates, size, dimension):
    """
    All size-subsets of candidates (in lexicographic order) whose union with base is a cap.
    """
    if size == 0:
        yield ()
        return
    table = coordinate_table(dimension)
    chosen = []

    def recurse(start):
        if len(chosen) == size:
            yield tuple(chosen)
            return
        for position in range(start, len(candidates)):
            point = candidates[position]
            if chosen:
                thirds = indices_of(-(table[point] + table[chosen]), dimension)
                if base.membership[thirds].any() or np.isin(thirds, chosen).any():
                    continue
            chosen.append(point)
            yield from recurse(position + 1)
            chosen.pop()

    yield from recurse(0)


def replace_points(cap, k, forbid=None, stop_after_nontrivial=False, log=LOG):
    """
    All pairs (removed, added) of k-subsets such that (cap - removed) + added is a cap not rejected by forbid.
    @param cap: CapSet
    @param k: 1 <= k <= |cap|
    @param forbid: predicate on CapSet (True rejects) or None
    @param stop_after_nontrivial: stop at the first solution with added != removed
    @param log:
    @return: list of (removed tuple, added tuple), trivial solutions included
    """
    if not 1 <= k <= cap.size:
        raise GeometryException(f"k={k} out of range 1..{cap.size}.")
    solutions = []
    for removed in itertools.combinations(cap.points, k):
        rest = cap.with_points(removed=removed, check=False)
        candidates = addable_points(rest)
        for added in _compatible_subsets(rest, candidates, k, cap.dimension):
            result = rest.with_points(added=added, check=False)
            if forbid is not None and forbid(result):
                continue
            solutions.append((removed, added))
            if stop_after_nontrivial and added != removed:
                log.info("Nontrivial replacement found: %s -> %s.", removed, added)
                return solutions
    log.debug("%s replacements of %s points found.", len(solutions), k)
    return solutions


@dataclass
class MidpointProfile:
    """
    first sits at level -1, second at level +1 of the first coordinate of F_3^(d+1); the third point of
    (-1, a) and (1, b) is (0, -(a + b)).
    """
    first: CapSet
    second: CapSet

    def __post_init__(self):
        if self.first.dimension != self.second.dimension:
            raise DimensionMismatchException("Both caps of a midpoint profile need the same dimension.")
        table = coordinate_table(self.dimension)
        first = table[list(self.first.points)]
        second = table[list(self.second.points)]
        self.middle = indices_of(-(first[:, None, :] + second[None, :, :]), self.dimension).reshape(
            len(first), len(second))
        self.counts = np.bincount(self.middle.reshape(-1), minlength=point_count(self.dimension))

    @property
    def dimension(self):
        return self.first.dimension

    def n(self, point):
        return int(self.counts[point])

    def segments(self, point):
        """
        Pairs (a, b) of first x second whose line passes through point.
        """
        rows, columns = np.nonzero(self.middle == point)
        return [(self.first.points[row], self.second.points[column]) for row, column in zip(rows, columns)]

    def endpoints(self, point, side):
        """
        S_a(Q): endpoints at level side (-1 or 1) of the segments through point.
        """
        if side not in (-1, 1):
            raise GeometryException(f"Side must be -1 or 1, got {side}.")
        return sorted({pair[0] if side == -1 else pair[1] for pair in self.segments(point)})

    def histogram(self):
        """
        n -> number of middle points Q with n(Q) = n.
        """
        return dict(sorted(Counter(self.counts.tolist()).items()))

    def points_with(self, value):
        return tuple(int(point) for point in np.flatnonzero(self.counts == value))

    def addable_middle(self):
        """
        Middle points not blocked by a cross line (n(Q) = 0).
        """
        return self.points_with(0)

    def statistics(self):
        """
        (n0, n2): number of middle points with n(Q) = 0 and with n(Q) <= 2.
        """
        return int((self.counts == 0).sum()), int((self.counts <= 2).sum())


def midpoint_profile(first, second):
    """
    @param first: cap at level -1
    @param second: cap at level +1
    @return: MidpointProfile with sum of n(Q) = |first| * |second|
    """
    return MidpointProfile(first, second)


def stack_levels(levels):
    """
    Embeds caps of dimension d at the levels of the first coordinate of F_3^(d+1).
    @param levels: mapping from level (-1, 0, 1) to CapSet or point collection
    @return: CapSet of dimension d + 1 (unchecked)
    """
    points = []
    dimension = None
    for level, content in levels.items():
        members = content.points if isinstance(content, CapSet) else tuple(content)
        if isinstance(content, CapSet):
            dimension = content.dimension
        points.append((level % 3, members))
    if dimension is None:
        raise GeometryException("At least one level needs a CapSet to fix the dimension.")
    offset = point_count(dimension)
    return CapSet.from_points(dimension + 1, [level * offset + point for level, members in points
                                              for point in members], check=False)


def level_caps(cap):
    """
    Splits a cap of dimension d + 1 along the first coordinate into its levels -1, 0, 1 (dimension d each).
    """
    offset = point_count(cap.dimension - 1)
    levels = {-1: [], 0: [], 1: []}
    for point in cap.points:
        level = point // offset
        levels[{0: 0, 1: 1, 2: -1}[level]].append(point % offset)
    return {level: CapSet.from_points(cap.dimension - 1, points, check=False) for level, points in levels.items()}


