"""
Relative placements of a cap and a linear image of it in the two outer levels of one more dimension.

A base cap C of dimension d + 1 is written as x = (a, w) with a its first coordinate. A placement is a linear map
T with T(a, w) = (a, B w + a u) (optionally composed with -1) and puts C at level -1 and T(C) at level +1 of
F_3^(d+2); the middle level is judged by the midpoint profile of the two caps.
"""

import itertools
import logging
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from capatlas.core.utility import field
from capatlas.engine.geometry import AffineMap, CapSet, coordinate_table
from capatlas.engine.search import level_caps, midpoint_profile, stack_levels
from capatlas.engine.symmetry import are_isomorphic, automorphisms
from capatlas.models.exceptions import ConfigurationException, GeometryException
from capatlas.models.return_threading import map_parallel

LOG = logging.getLogger("capatlas")

MODES = ("fiber-aligned", "shift")
CONVENTIONS = ("aut-left",)


@dataclass(frozen=True)
class Placement:
    """
    kind: translation, reflection or aligned; linear: full linear part of T; shift: u (or v) of the shear part;
    image: T(base); index: position in the enumeration.
    """
    kind: str
    linear: tuple
    shift: tuple
    image: CapSet
    index: int
    base: CapSet = dataclass_field(compare=False, repr=False, default=None)

    def to_dict(self):
        return {"index": self.index, "kind": self.kind, "linear": [list(row) for row in self.linear],
                "shift": list(self.shift)}


def recoordinatise(cap, functionals):
    """
    Linear change of coordinates making the given independent functionals the leading coordinates.
    @param cap: CapSet
    @param functionals: rows over F_3
    @return: (image CapSet, AffineMap used)
    """
    rows = [tuple(int(value) % 3 for value in row) for row in functionals]
    if field.rank(rows) != len(rows):
        raise GeometryException("Functionals for a change of coordinates must be independent.")
    for axis in range(cap.dimension):
        unit = tuple(1 if column == axis else 0 for column in range(cap.dimension))
        if field.rank(rows + [unit]) > len(rows):
            rows.append(unit)
    affine_map = AffineMap.create(rows)
    return affine_map.apply(cap), affine_map


def _shear(sign, fiber_linear, shift):
    """
    Matrix of (a, w) -> sign * (a, B w + a u).
    """
    dimension = len(shift) + 1
    matrix = np.zeros((dimension, dimension), dtype=np.int64)
    matrix[0, 0] = 1
    matrix[1:, 0] = shift
    matrix[1:, 1:] = fiber_linear
    return tuple(tuple(int(value) % 3 for value in row) for row in (sign * matrix))


def translation_vector(first, second):
    """
    t with first + t = second, or None.
    """
    if first.dimension != second.dimension or first.size != second.size:
        return None
    if not first.size:
        return (0,) * first.dimension
    table = coordinate_table(first.dimension)
    anchor = table[first.points[0]]
    for point in second.points:
        vector = tuple(int(value) for value in (table[point] - anchor) % 3)
        if AffineMap.trusted(np.eye(first.dimension, dtype=int).tolist(), vector).apply(first) == second:
            return vector
    return None


def is_translation(first, second):
    return translation_vector(first, second) is not None


def is_point_reflection(first, second):
    """
    True iff second = 2c - first for some centre c.
    """
    negated = AffineMap.trusted((2 * np.eye(first.dimension, dtype=int)).tolist(), (0,) * first.dimension)
    return is_translation(negated.apply(first), second)


def classify(base, image):
    if is_translation(base, image):
        return "translation"
    if is_point_reflection(base, image):
        return "reflection"
    return "aligned"


def fiber_linear_parts(base, log=LOG):
    """
    Linear parts B (and -B) of all affine isomorphisms from the level -1 fiber of base onto its level -1 and
    level +1 fibers, sorted.
    """
    levels = level_caps(base)
    source = levels[-1]
    group = automorphisms(source, log)
    parts = set()
    for target in (levels[-1], levels[1]):
        isomorphism = are_isomorphic(source, target, log)
        if isomorphism is None:
            log.info("Level fibers of the base are not isomorphic, skipping one target.")
            continue
        for element in group:
            linear = isomorphism.compose(element).linear
            parts.add(linear)
            parts.add(tuple(tuple((-value) % 3 for value in row) for row in linear))
    return sorted(parts)


def enumerate_placements(base, mode, convention="aut-left", kind="all", threads=1, log=LOG):
    """
    @param base: CapSet of dimension d + 1
    @param mode: "shift" (2 * 3^d placements: T = S_v or S_v composed with -1) or "fiber-aligned"
    (T(a, w) = (a, B w + a u) with B from fiber_linear_parts, one placement per distinct image)
    @param convention: quotient convention, only "aut-left"
    @param kind: "all" or a kind to keep
    @param threads: worker threads
    @param log:
    @return: list of Placement
    """
    if convention not in CONVENTIONS:
        raise ConfigurationException(f"Unknown placement convention '{convention}', expected one of {CONVENTIONS}.")
    if mode not in MODES:
        raise ConfigurationException(f"Unknown placement mode '{mode}', expected one of {MODES}.")
    inner = base.dimension - 1
    shifts = [tuple(int(value) for value in row) for row in coordinate_table(inner)]
    identity = np.eye(inner, dtype=np.int64)
    if mode == "shift":
        candidates = [(sign, identity, shift) for sign in (1, -1) for shift in shifts]
    else:
        candidates = [(1, np.array(linear, dtype=np.int64), shift)
                      for linear in fiber_linear_parts(base, log) for shift in shifts]
    log.info("Placement mode %s: %s candidate maps.", mode, len(candidates))

    def place(chunk):
        placed = []
        for sign, fiber_linear, shift in chunk:
            linear = _shear(sign, fiber_linear, shift)
            image = AffineMap.trusted(linear, (0,) * base.dimension).apply(base)
            if mode == "shift":
                placement_kind = "translation" if sign == 1 else "reflection"
            else:
                placement_kind = classify(base, image)
            placed.append((placement_kind, linear, shift, image))
        return placed

    placements = []
    seen = set()
    for placement_kind, linear, shift, image in map_parallel(place, candidates, threads):
        if mode == "fiber-aligned":
            if image.mask in seen:
                continue
            seen.add(image.mask)
        if kind != "all" and placement_kind != kind:
            continue
        placements.append(Placement(placement_kind, linear, shift, image, len(placements), base))
    log.info("%s placements after the %s quotient.", len(placements), convention)
    return placements


def placement_profile(placement):
    return midpoint_profile(placement.base, placement.image)


def placement_statistics(placement):
    """
    (n0, n2) of the middle level: points on no cross segment, points on at most two.
    """
    return placement_profile(placement).statistics()


def statistics_census(placements, threads=1):
    """
    (n0, n2) -> number of placements.
    """
    census = {}
    for statistics in map_parallel(lambda chunk: [placement_statistics(placement) for placement in chunk],
                                   placements, threads):
        census[statistics] = census.get(statistics, 0) + 1
    return dict(sorted(census.items()))


def placement_union(placement, middle=None):
    """
    Base at level -1, image at level +1, middle points at level 0 (default: all points with n(Q) = 0).
    @return: CapSet of dimension d + 2, not checked
    """
    if middle is None:
        middle = placement_profile(placement).addable_middle()
    return stack_levels({-1: placement.base, 0: middle, 1: placement.image})


def middle_is_cap(placement):
    """
    True iff the points with n(Q) = 0 are pairwise compatible (their union with both caps is a cap).
    """
    return placement_union(placement).is_valid()


def middle_subsets(placement, size):
    """
    All size-subsets of the n(Q) = 0 points whose union with both caps is a cap.
    """
    middle = placement_profile(placement).addable_middle()
    for subset in itertools.combinations(middle, size):
        if placement_union(placement, subset).is_valid():
            yield subset
