"""
Named substructures of the representative caps: cubes, pyramids and squares in small fibers, the distinguished
coordinates of an 882A2, the hyperplane direction categories and the axis of a 45-cap, and the dual point set of
its 882A2 directions.
"""

import functools
import itertools
import logging
from collections import Counter
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from capatlas.core.utility import field
from capatlas.engine.directions import (enumerate_directions, point_count_matrix, raw_counts, span_direction,
                                        spectrum)
from capatlas.engine.geometry import (CapSet, Fibration, affine_hull_dimension, coordinate_table, fibers, index_of,
                                      indices_of, point_count, third_on_line)
from capatlas.engine.placements import translation_vector
from capatlas.engine.symmetry import canonical_form
from capatlas.models.reports import FeatureReport

LOG = logging.getLogger("capatlas")

DISTINGUISHED_MATRIX = [[2, 4, 2], [1, 0, 1], [2, 4, 2]]
DUAL_MATRICES = ([[9, 0, 18], [18, 0, 18], [18, 0, 9]], [[18, 0, 9], [18, 0, 18], [9, 0, 18]])


@functools.lru_cache(maxsize=None)
def cube():
    """
    The 8-cap {1, 2}^3.
    """
    return CapSet.from_points(3, [index_of(coords) for coords in itertools.product((1, 2), repeat=3)])


@functools.lru_cache(maxsize=None)
def _cube_key():
    return canonical_form(cube()).canonical.mask


def is_cube(cap):
    """
    True iff cap is an 8-cap of dimension 3 affinely equivalent to {1, 2}^3.
    """
    return cap.dimension == 3 and cap.size == 8 and canonical_form(cap).canonical.mask == _cube_key()


def is_pyramid(cap):
    """
    A 5-cap of dimension 3 is a square pyramid iff four of its points are coplanar; otherwise it is a tetrahedron
    plus centre.
    """
    counts = raw_counts(cap.points, cap.dimension, enumerate_directions(cap.dimension, 1))
    return bool((counts >= 4).any())


def class_key(cap, log=LOG):
    """
    Canonical mask of a spanning cap, the key of its affine class.
    """
    return canonical_form(cap, log).canonical.mask


def direction_fibers(cap, direction, constants=()):
    return fibers(cap, Fibration(direction.basis, tuple(constants)))


def kernel(direction):
    """
    Basis of the direction space shared by all flats of direction.
    """
    return field.nullspace(direction.basis, direction.dimension)


def ambient_span(vectors, fibration):
    """
    Echelon basis of the ambient subspace spanned by vectors given in the coordinates of a fiber of fibration.
    """
    basis = np.array(fibration.direction_basis, dtype=np.int64)
    lifted = (np.array(vectors, dtype=np.int64).reshape(len(vectors), len(basis)) @ basis) % 3
    return field.rref(lifted.tolist())[0]


def is_square(points, dimension):
    """
    Four points of a 2-flat with no three collinear.
    """
    points = sorted(set(points))
    return len(points) == 4 and affine_hull_dimension(points, dimension) == 2 and CapSet(
        dimension, sum(1 << point for point in points)).is_valid()


def square_centre(points, dimension):
    """
    The point c outside the square with -c - p in the square for all its points p, or None.
    """
    table = coordinate_table(dimension)
    points = sorted(points)
    images = indices_of(-(table[:, None, :] + table[points][None, :, :]), dimension)
    matches = (np.sort(images, axis=1) == np.array(points)).all(axis=1)
    matches[points] = False
    candidates = np.flatnonzero(matches)
    return int(candidates[0]) if len(candidates) else None


def square_directions(points, dimension):
    """
    Side and diagonal line directions of a square as normalised difference vectors: sides carry two pairs of the
    square, diagonals one.
    """
    table = coordinate_table(dimension)
    seen = Counter(field.normalize_vector(tuple(int(value) for value in (table[second] - table[first]) % 3))
                   for first, second in itertools.combinations(points, 2))
    sides = tuple(sorted(vector for vector, pairs in seen.items() if pairs == 2))
    diagonals = tuple(sorted(vector for vector, pairs in seen.items() if pairs == 1))
    return sides, diagonals


@dataclass
class Features882:
    """
    Feature analysis of an 18-cap 4-flat. Direction lists hold every direction with the property, so uniqueness
    is a length check.
    """
    cap: CapSet
    nine_twos: list = dataclass_field(default_factory=list)
    cube_855: list = dataclass_field(default_factory=list)
    cube_882: list = dataclass_field(default_factory=list)
    first: tuple = None
    second: tuple = None
    constants: tuple = None
    standard_squares: tuple = ()
    square_of_midpoints: tuple = ()
    side_points: tuple = ()
    centres: tuple = ()
    plane: tuple = ()

    def properties(self):
        """
        Named properties of an 882A2, all True for one.
        """
        squares = [CapSet.from_points(4, square, check=False) for square in self.standard_squares]
        return {
            "nineTwosUnique": len(self.nine_twos) == 1,
            "cube855Unique": len(self.cube_855) == 1,
            "cube882Unique": len(self.cube_882) == 1,
            "distinguishedPair": self.constants is not None,
            "standardSquares": len(squares) == 2 and all(is_square(square.points, 4) for square in squares)
                               and translation_vector(squares[0], squares[1]) is not None,
            "squareOfMidpoints": is_square(self.square_of_midpoints, 4),
            "planeOfSquare": bool(self.plane) and None not in self.centres
                             and set(self.centres) | set(self.side_points) <= set(self.plane)
        }

    def is_882A2(self):
        return all(self.properties().values())

    def to_report(self):
        return FeatureReport(
            kind="882A2",
            nineTwosDirection=[list(row) for row in self.nine_twos[0].basis] if self.nine_twos else None,
            cube855Direction=list(self.first) if self.first else None,
            cube882Direction=list(self.second) if self.second else None,
            distinguishedPair=[list(self.first), list(self.second)] if self.constants else None,
            distinguishedConstants=list(self.constants) if self.constants else None,
            standardSquares=[list(square) for square in self.standard_squares] or None,
            squareOfMidpoints=list(self.square_of_midpoints) or None,
            planeOfSquare=list(self.plane) or None)


def _cube_directions(cap, pattern):
    """
    Hyperplane directions with sorted point count pattern whose 8-point fibers are all cubes.
    """
    directions = enumerate_directions(cap.dimension, 1)
    counts = np.sort(raw_counts(cap.points, cap.dimension, directions), axis=1)[:, ::-1]
    found = []
    for index in np.flatnonzero((counts == np.array(pattern)).all(axis=1)):
        parts = direction_fibers(cap, directions[index])
        if all(is_cube(part) for part in parts.values() if part.size == 8):
            found.append(directions[index])
    return found


def _distinguished_constants(cap, first, second):
    """
    Constants (c1, c2) with the point count of (first + c1, second + c2) equal to the distinguished matrix, rows
    by the second functional.
    """
    for constants in itertools.product(range(3), repeat=2):
        if point_count_matrix(cap, second, first, (constants[1], constants[0])) == DISTINGUISHED_MATRIX:
            return constants
    return None


def analyze_882A2(cap, log=LOG):
    """
    Features of an 18-cap 4-flat: nine-2s 2-flat direction, 855 and 882 cube directions, the distinguished
    coordinate pair (x1, x2) and the squares it determines.
    @param cap: 18-cap of dimension 4
    @param log:
    @return: Features882
    """
    features = Features882(cap)
    planes = enumerate_directions(cap.dimension, 2)
    plane_counts = raw_counts(cap.points, cap.dimension, planes)
    features.nine_twos = [planes[index] for index in np.flatnonzero((plane_counts == 2).all(axis=1))]
    features.cube_855 = _cube_directions(cap, (8, 5, 5))
    features.cube_882 = _cube_directions(cap, (8, 8, 2))
    log.debug("18-cap features: %s nine-2s, %s 855 cube, %s 882 cube directions.", len(features.nine_twos),
              len(features.cube_855), len(features.cube_882))
    if len(features.cube_855) != 1 or len(features.cube_882) != 1:
        return features
    features.first = features.cube_855[0].basis[0]
    features.second = features.cube_882[0].basis[0]
    features.constants = _distinguished_constants(cap, features.first, features.second)
    if features.constants is None:
        return features

    coords = cap.coordinates()
    first_values = (coords @ np.array(features.first) + features.constants[0]) % 3
    second_values = (coords @ np.array(features.second) + features.constants[1]) % 3
    points = np.array(cap.points)

    def cell(first_value, second_value):
        return tuple(int(point) for point in points[(first_values == first_value % 3)
                                                    & (second_values == second_value % 3)])

    features.standard_squares = (cell(0, -1), cell(0, 1))
    midpoints = []
    for first_value, second_value in itertools.product((-1, 1), repeat=2):
        pair = cell(first_value, second_value)
        if len(pair) == 2:
            midpoints.append(third_on_line(pair[0], pair[1], cap.dimension))
    features.square_of_midpoints = tuple(sorted(midpoints))
    features.side_points = cell(-1, 0) + cell(1, 0)
    features.centres = tuple(square_centre(square, cap.dimension) for square in features.standard_squares)
    if is_square(features.square_of_midpoints, cap.dimension):
        features.plane = tuple(point for point in range(point_count(cap.dimension)) if affine_hull_dimension(
            features.square_of_midpoints + (point,), cap.dimension) == 2)
    return features


@dataclass
class Features45:
    """
    Hyperplane direction categories of a 45-cap 5-flat: "i" (two 18-caps of the other class), "ii" (two 882A2),
    "iii" ({15,15,15}, containing the axis), "iv" ({15,15,15}, not containing it) and "other".
    """
    cap: CapSet
    special_directions: list = dataclass_field(default_factory=list)
    axis_basis: tuple = ()
    categories: dict = dataclass_field(default_factory=dict)

    @property
    def axis(self):
        return field.normalize_vector(self.axis_basis[0]) if len(self.axis_basis) == 1 else None

    def census(self):
        return {category: len(directions) for category, directions in sorted(self.categories.items())}

    def to_report(self):
        return FeatureReport(kind="45cap", axis=list(self.axis) if self.axis else None,
                             specialThreeFlatDirections=len(self.special_directions), categories=self.census())


def three_flat_census(cap, log=LOG):
    """
    3-flat directions whose nine 3-flats are eight square pyramids and one tetrahedron plus centre.
    """
    directions = enumerate_directions(cap.dimension, 2)
    counts = raw_counts(cap.points, cap.dimension, directions)
    special = []
    for index in np.flatnonzero((counts == 5).all(axis=1)):
        pyramids = sum(is_pyramid(part) for part in direction_fibers(cap, directions[index]).values())
        if pyramids == 8:
            special.append(directions[index])
    log.debug("%s of %s 3-flat directions are eight pyramids plus one tetrahedron plus centre.", len(special),
              len(directions))
    return special


def axis_direction(special_directions, dimension):
    """
    Basis of the common direction space of the given 3-flat directions; one vector iff the axis is unique.
    """
    rows = [row for direction in special_directions for row in direction.basis]
    return field.nullspace(rows, dimension)


def analyze_45cap(cap, reference_882, log=LOG):
    """
    @param cap: 45-cap of dimension 5
    @param reference_882: an 882A2 cap (dimension 4) fixing the class of category "ii"
    @param log:
    @return: Features45
    """
    features = Features45(cap)
    features.special_directions = three_flat_census(cap, log)
    features.axis_basis = axis_direction(features.special_directions, cap.dimension)
    reference = class_key(reference_882, log)
    categories = {"i": [], "ii": [], "iii": [], "iv": [], "other": []}
    directions = enumerate_directions(cap.dimension, 1)
    counts = np.sort(raw_counts(cap.points, cap.dimension, directions), axis=1)
    for direction, row in zip(directions, counts):
        if tuple(row) == (9, 18, 18):
            keys = [class_key(part, log) for part in direction_fibers(cap, direction).values() if part.size == 18]
            if keys[0] == keys[1] == reference:
                categories["ii"].append(direction)
            elif keys[0] == keys[1]:
                categories["i"].append(direction)
            else:
                categories["other"].append(direction)
        elif tuple(row) == (15, 15, 15) and features.axis is not None:
            contains = sum(a * b for a, b in zip(direction.basis[0], features.axis)) % 3 == 0
            categories["iii" if contains else "iv"].append(direction)
        else:
            categories["other"].append(direction)
    features.categories = categories
    log.info("45-cap direction categories: %s.", features.census())
    return features


def reference_fiber(cap, direction):
    """
    The two 18-point fibers of an {18,9,18} direction with the fibration they live in.
    """
    fibration = Fibration(direction.basis)
    parts = fibers(cap, fibration)
    return fibration, [parts[label] for label in sorted(parts) if parts[label].size == 18]


def lemma_2_4_parallelism(cap45, directions, log=LOG):
    """
    In every given {18,9,18} direction with two 882A2 fibers: the nine-2s directions are parallel, the 882 cube
    direction of each fiber is parallel to the 855 cube direction of the other, and the side directions of the
    standard squares of each fiber are parallel to the diagonal directions of those of the other.
    @return: list of (direction, failed property names), empty iff everything holds
    """
    failures = []
    for direction in directions:
        fibration, parts = reference_fiber(cap45, direction)
        analysed = [analyze_882A2(part, log) for part in parts]
        failed = []
        if not all(features.is_882A2() for features in analysed):
            failures.append((direction, ["notTwo882A2"]))
            continue
        nine_twos = [ambient_span(kernel(features.nine_twos[0]), fibration) for features in analysed]
        if nine_twos[0] != nine_twos[1]:
            failed.append("nineTwosParallel")
        for mine, other in ((0, 1), (1, 0)):
            if ambient_span(kernel(analysed[mine].cube_882[0]), fibration) != ambient_span(
                    kernel(analysed[other].cube_855[0]), fibration):
                failed.append(f"cube882Parallel{mine}")
            sides = {ambient_span([vector], fibration) for square in analysed[mine].standard_squares
                     for vector in square_directions(square, 4)[0]}
            diagonals = {ambient_span([vector], fibration) for square in analysed[other].standard_squares
                         for vector in square_directions(square, 4)[1]}
            if sides != diagonals:
                failed.append(f"sidesDiagonals{mine}")
        if failed:
            failures.append((direction, failed))
    log.info("Parallelism checked in %s directions, %s failures.", len(directions), len(failures))
    return failures


@dataclass
class DualDesign:
    """
    The dual vectors +-f of the 882A2 hyperplane directions of a 45-cap as a point set of the dual space.
    """
    points: CapSet
    report: object = None
    empty_direction: object = None
    matrices: list = dataclass_field(default_factory=list)
    flat_failures: list = dataclass_field(default_factory=list)

    @property
    def size(self):
        return self.points.size


def _three_disjoint_lines(points, dimension):
    """
    True iff the points are the union of three pairwise disjoint lines.
    """
    members = set(points)
    lines = set()
    for first, second in itertools.combinations(sorted(members), 2):
        third = third_on_line(first, second, dimension)
        if third in members:
            lines.add(frozenset((first, second, third)))
    return any(len(set().union(*chosen)) == 9 for chosen in itertools.combinations(lines, 3))


def dual_design(cap45, directions, threads=1, log=LOG):
    """
    @param cap45: 45-cap of dimension 5
    @param directions: its category "ii" hyperplane directions
    @param threads: worker threads for the spectrum
    @param log:
    @return: DualDesign with spectrum, the {45,45,0} direction and the (y, z) matrices of every {36,27,27}
    direction
    """
    dimension = cap45.dimension
    vectors = set()
    for direction in directions:
        functional = direction.basis[0]
        vectors.add(index_of(functional))
        vectors.add(index_of(tuple((-value) % 3 for value in functional)))
    design = DualDesign(CapSet.from_points(dimension, vectors, check=False))
    design.report = spectrum(design.points, 1, threads, log)
    counts = {}
    for direction in enumerate_directions(dimension, 1):
        counts[direction] = tuple(sorted(raw_counts(design.points.points, dimension, [direction])[0], reverse=True))
    empty = [direction for direction, count in counts.items() if count == (45, 45, 0)]
    if len(empty) != 1:
        log.warning("Dual design has %s {45,45,0} directions.", len(empty))
        return design
    design.empty_direction = empty[0]
    y_functional = empty[0].basis[0]
    for direction, count in counts.items():
        if count != (36, 27, 27):
            continue
        matrix = point_count_matrix(design.points, direction.basis[0], y_functional)
        design.matrices.append((direction, matrix))
        for label, part in fibers(design.points, Fibration((direction.basis[0], y_functional))).items():
            if part.size == 9 and not part.is_valid():
                design.flat_failures.append((direction, label, "nineNotCap"))
            elif part.size == 18:
                complement = sorted(set(range(point_count(part.dimension))) - set(part.points))
                if not _three_disjoint_lines(complement, part.dimension):
                    design.flat_failures.append((direction, label, "eighteenNotLineComplement"))
    return design


def axis_matches(direction, axis):
    """
    True iff the dual direction's functional spans the same line as the axis vector.
    """
    return span_direction([direction.basis[0]]) == span_direction([axis])
