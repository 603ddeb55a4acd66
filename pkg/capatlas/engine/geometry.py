"""
Exact arithmetic over F_3^n: points, lines, flats, affine maps and the cap predicate.

Points are integer indices in [0, 3^n): the base-3 expansion with coordinate 1 as the most significant digit.
Sets of points are dense masks (Python integers, bit i = point i), which fixes the iteration order to the
index order everywhere.
"""

import functools
import itertools
import random
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from capatlas.core.utility import field
from capatlas.models.exceptions import DimensionMismatchException, GeometryException

KNOWN_MAXIMUM_CAP_SIZES = {0: 1, 1: 2, 2: 4, 3: 9, 4: 20, 5: 45, 6: 112}
THIRD_POINT_TABLE_LIMIT = 5
MAX_DIMENSION = 8


def point_count(dimension):
    return 3 ** dimension


@functools.lru_cache(maxsize=None)
def powers(dimension):
    """
    Place values of the coordinates, coordinate 1 first.
    """
    return np.array([3 ** (dimension - 1 - i) for i in range(dimension)], dtype=np.int64)


@functools.lru_cache(maxsize=None)
def coordinate_table(dimension):
    """
    Row i holds the coordinates of point i. Read-only.
    """
    table = np.array(list(itertools.product(range(3), repeat=dimension)), dtype=np.int64).reshape(
        point_count(dimension), dimension)
    table.setflags(write=False)
    return table


def coords_of(point, dimension):
    return tuple(int(value) for value in coordinate_table(dimension)[point])


def index_of(coords):
    index = 0
    for value in coords:
        index = 3 * index + int(value) % 3
    return index


def indices_of(coordinates, dimension):
    """
    Vectorised index_of over the last axis of an integer array.
    """
    return (np.asarray(coordinates) % 3) @ powers(dimension)


@functools.lru_cache(maxsize=None)
def third_point_table(dimension):
    """
    table[p, q] is the third point of the line through p and q (p itself on the diagonal).
    Only built for small dimensions.
    """
    table = coordinate_table(dimension)
    third = indices_of(-(table[:, None, :] + table[None, :, :]), dimension).astype(np.int32)
    third.setflags(write=False)
    return third


def third_points(first, second, dimension):
    """
    Vectorised third point of the lines through first[i] and second[i].
    """
    first = np.asarray(first, dtype=np.int64)
    second = np.asarray(second, dtype=np.int64)
    if dimension <= THIRD_POINT_TABLE_LIMIT:
        return third_point_table(dimension)[first, second].astype(np.int64)
    table = coordinate_table(dimension)
    return indices_of(-(table[first] + table[second]), dimension)


def third_on_line(p, q, dimension):
    """
    Returns r = -(p + q), the third point of the line through p and q.
    @param p: point index
    @param q: point index, different from p
    @param dimension: ambient dimension
    @return: point index
    """
    limit = point_count(dimension)
    if not (0 <= p < limit and 0 <= q < limit):
        raise DimensionMismatchException(f"Points {p}, {q} are not points of dimension {dimension}.")
    if p == q:
        raise GeometryException(f"A line needs two different points, got {p} twice.")
    return int(third_points([p], [q], dimension)[0])


def mask_from_points(points):
    mask = 0
    for point in points:
        mask |= 1 << int(point)
    return mask


def points_from_mask(mask, dimension):
    return tuple(int(point) for point in np.flatnonzero(membership_from_mask(mask, dimension)))


def membership_from_mask(mask, dimension):
    """
    Boolean array of length 3^n.
    """
    size = point_count(dimension)
    raw = np.frombuffer(mask.to_bytes((size + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:size].astype(bool)


def mask_from_membership(membership):
    packed = np.packbits(np.asarray(membership, dtype=np.uint8), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def pair_third_points(points, dimension):
    """
    Third points of all unordered pairs of the given points (each line counted once).
    """
    points = np.asarray(points, dtype=np.int64)
    if len(points) < 2:
        return np.empty(0, dtype=np.int64)
    first, second = np.triu_indices(len(points), k=1)
    return third_points(points[first], points[second], dimension)


def is_cap(points, dimension):
    """
    True iff no three of the points are on a common line.
    @param points: iterable of point indices
    @param dimension: ambient dimension
    @return: bool
    """
    points = np.unique(np.asarray(list(points), dtype=np.int64))
    if len(points) < 3:
        return True
    if points[-1] >= point_count(dimension):
        raise DimensionMismatchException(f"Point {points[-1]} is not a point of dimension {dimension}.")
    membership = np.zeros(point_count(dimension), dtype=bool)
    membership[points] = True
    return not membership[pair_third_points(points, dimension)].any()


def brute_force_is_cap(points, dimension):
    """
    Independent oracle: checks every 3-subset with the coordinate identity p + q + r = 0.
    """
    coords = [coords_of(point, dimension) for point in set(points)]
    for first, second, third in itertools.combinations(coords, 3):
        if all((a + b + c) % 3 == 0 for a, b, c in zip(first, second, third)):
            return False
    return True


@dataclass(frozen=True)
class CapSet:
    """
    A cap of AG(n, 3): dimension plus dense membership mask.
    """
    dimension: int
    mask: int

    def __post_init__(self):
        if self.mask < 0 or self.mask >> point_count(self.dimension):
            raise GeometryException(f"Mask has bits outside the {point_count(self.dimension)} points of dimension "
                                    f"{self.dimension}.")

    @classmethod
    def from_points(cls, dimension, points, check=True):
        """
        @param dimension: ambient dimension
        @param points: iterable of point indices
        @param check: verify the cap property
        @return: CapSet
        """
        points = list(points)
        if not 0 <= dimension <= MAX_DIMENSION:
            raise GeometryException(f"Dimension {dimension} not supported (0..{MAX_DIMENSION}).")
        if check and not is_cap(points, dimension):
            raise GeometryException(f"Point set of size {len(set(points))} is not a cap in dimension {dimension}.")
        return cls(dimension, mask_from_points(points))

    @classmethod
    def empty(cls, dimension):
        return cls(dimension, 0)

    @cached_property
    def points(self):
        return points_from_mask(self.mask, self.dimension)

    @cached_property
    def membership(self):
        membership = membership_from_mask(self.mask, self.dimension)
        membership.setflags(write=False)
        return membership

    @property
    def size(self):
        return self.mask.bit_count()

    def __len__(self):
        return self.size

    def __contains__(self, point):
        return bool(self.mask >> int(point) & 1)

    def __iter__(self):
        return iter(self.points)

    def coordinates(self):
        return coordinate_table(self.dimension)[list(self.points)]

    def with_points(self, added=(), removed=(), check=True):
        mask = self.mask
        for point in removed:
            mask &= ~(1 << int(point))
        for point in added:
            mask |= 1 << int(point)
        if check and not is_cap(points_from_mask(mask, self.dimension), self.dimension):
            raise GeometryException("Modified point set is not a cap.")
        return CapSet(self.dimension, mask)

    def is_valid(self):
        return is_cap(self.points, self.dimension)


def blocked_mask(cap):
    """
    Points that can not be added to cap: the cap itself plus all third points of cap pairs.
    """
    membership = np.array(cap.membership)
    membership[pair_third_points(cap.points, cap.dimension)] = True
    return mask_from_membership(membership)


def addable_points(cap):
    """
    All points P not in cap such that cap + {P} is a cap. Empty iff cap is complete.
    @param cap: CapSet
    @return: tuple of point indices in index order
    """
    full = (1 << point_count(cap.dimension)) - 1
    return points_from_mask(full & ~blocked_mask(cap), cap.dimension)


def is_complete(cap):
    return not addable_points(cap)


def affine_hull_dimension(points, dimension):
    """
    Dimension of the smallest flat containing the points (-1 for no points).
    """
    points = list(points)
    if not points:
        return -1
    origin = np.array(coords_of(points[0], dimension))
    differences = [tuple((np.array(coords_of(point, dimension)) - origin) % 3) for point in points[1:]]
    return field.rank(differences) if differences else 0


def flat_points(base, basis, dimension):
    """
    Points of the flat base + span(basis) in coordinate order: entry j is base + sum(lambda_i * basis_i)
    where lambda = coords_of(j, k) (basis[0] is the most significant direction).
    @param base: point index of the flat's base point
    @param basis: k independent vectors (coordinate tuples)
    @param dimension: ambient dimension
    @return: numpy array of 3^k point indices
    """
    basis = np.array(basis, dtype=np.int64).reshape(len(basis), dimension)
    lambdas = coordinate_table(len(basis))
    coords = np.array(coords_of(base, dimension), dtype=np.int64) + lambdas @ basis
    return indices_of(coords, dimension)


@dataclass(frozen=True)
class AffineMap:
    """
    x -> linear . x + translation over F_3, linear invertible.
    """
    linear: tuple
    translation: tuple

    def __post_init__(self):
        dimension = len(self.translation)
        if len(self.linear) != dimension or any(len(row) != dimension for row in self.linear):
            raise DimensionMismatchException("Linear part and translation dimensions differ.")
        if dimension and field.determinant(self.linear) == 0:
            raise GeometryException("Linear part of an affine map must be invertible.")

    @classmethod
    def create(cls, linear, translation=None):
        linear = tuple(tuple(int(value) % 3 for value in row) for row in linear)
        translation = tuple(int(value) % 3 for value in (translation or (0,) * len(linear)))
        return cls(linear, translation)

    @classmethod
    def trusted(cls, linear, translation):
        """
        Skips the determinant check; only for maps derived from invertible ones.
        """
        instance = object.__new__(cls)
        object.__setattr__(instance, "linear", tuple(tuple(int(value) % 3 for value in row) for row in linear))
        object.__setattr__(instance, "translation", tuple(int(value) % 3 for value in translation))
        return instance

    @classmethod
    def identity(cls, dimension):
        return cls.trusted(np.eye(dimension, dtype=int).tolist(), (0,) * dimension)

    @classmethod
    def from_permutation(cls, permutation, dimension):
        """
        Recovers the affine map from the images of all points (permutation must come from an affine map).
        """
        translation = coords_of(int(permutation[0]), dimension)
        columns = []
        for axis in range(dimension):
            image = np.array(coords_of(int(permutation[3 ** (dimension - 1 - axis)]), dimension))
            columns.append(tuple((image - np.array(translation)) % 3))
        return cls.trusted(tuple(zip(*columns)) if columns else (), translation)

    @property
    def dimension(self):
        return len(self.translation)

    @cached_property
    def permutation(self):
        """
        permutation[p] = image of point p.
        """
        table = coordinate_table(self.dimension)
        images = indices_of(table @ np.array(self.linear, dtype=np.int64).reshape(
            self.dimension, self.dimension).T + np.array(self.translation, dtype=np.int64), self.dimension)
        images.setflags(write=False)
        return images

    def apply_point(self, point):
        return int(self.permutation[point])

    def apply(self, cap):
        if cap.dimension != self.dimension:
            raise DimensionMismatchException(f"Map of dimension {self.dimension} applied to a cap of dimension "
                                             f"{cap.dimension}.")
        membership = np.zeros(point_count(self.dimension), dtype=bool)
        membership[self.permutation[list(cap.points)]] = True
        return CapSet(self.dimension, mask_from_membership(membership))

    def compose(self, other):
        """
        self after other.
        """
        linear = field.multiply(self.linear, other.linear)
        shifted = field.multiply(self.linear, [[value] for value in other.translation])
        translation = tuple((row[0] + value) % 3 for row, value in zip(shifted, self.translation))
        return AffineMap.trusted(linear, translation)

    def inverse(self):
        linear = field.inverse(self.linear) if self.dimension else ()
        shifted = field.multiply(linear, [[value] for value in self.translation])
        return AffineMap.trusted(linear, tuple((-row[0]) % 3 for row in shifted))

    def to_dict(self):
        return {"linear": [list(row) for row in self.linear], "translation": list(self.translation)}


def apply_map(affine_map, cap):
    """
    Image of cap under affine_map; same size and again a cap.
    """
    return affine_map.apply(cap)


def translation(vector):
    dimension = len(vector)
    return AffineMap.trusted(np.eye(dimension, dtype=int).tolist(), vector)


def point_reflection(centre, dimension):
    """
    x -> 2c - x.
    """
    centre = coords_of(centre, dimension)
    return AffineMap.trusted((2 * np.eye(dimension, dtype=int)).tolist(), tuple((2 * value) % 3 for value in centre))


def random_affine_map(dimension, rng=None):
    """
    Uniformly random element of AGL(n, 3).
    """
    rng = rng or random.Random()
    while True:
        linear = [[rng.randrange(3) for _ in range(dimension)] for _ in range(dimension)]
        if field.determinant(linear):
            return AffineMap.create(linear, [rng.randrange(3) for _ in range(dimension)])


@dataclass(frozen=True)
class Fibration:
    """
    c independent functionals with constants; the value of x is (f_i . x + constant_i) mod 3.
    """
    functionals: tuple
    constants: tuple = ()

    def __post_init__(self):
        functionals = tuple(tuple(int(value) % 3 for value in row) for row in self.functionals)
        object.__setattr__(self, "functionals", functionals)
        constants = tuple(int(value) % 3 for value in self.constants) or (0,) * len(functionals)
        object.__setattr__(self, "constants", constants)
        if not functionals:
            raise GeometryException("A fibration needs at least one functional.")
        if len(constants) != len(functionals):
            raise GeometryException("One constant per functional expected.")
        if field.rank(functionals) != len(functionals):
            raise GeometryException("Functionals of a fibration must be linearly independent.")

    @property
    def dimension(self):
        return len(self.functionals[0])

    @property
    def codimension(self):
        return len(self.functionals)

    @cached_property
    def direction_basis(self):
        """
        Basis of the common kernel (direction space of every fiber).
        """
        return field.nullspace(self.functionals, self.dimension)

    def values(self, points):
        """
        Array (len(points), c) of fiber values.
        """
        coords = coordinate_table(self.dimension)[np.asarray(points, dtype=np.int64)]
        return (coords @ np.array(self.functionals, dtype=np.int64).T + np.array(self.constants)) % 3

    def labels(self, points):
        """
        Fiber label of each point as an integer in [0, 3^c) (value tuple read in base 3).
        """
        return self.values(points) @ powers(self.codimension)

    @cached_property
    def fiber_bases(self):
        """
        Minimal-index point of every fiber, indexed by label.
        """
        labels = self.labels(np.arange(point_count(self.dimension)))
        bases = np.full(point_count(self.codimension), -1, dtype=np.int64)
        for point in range(len(labels) - 1, -1, -1):
            bases[labels[point]] = point
        return bases

    def fiber_points(self, label):
        """
        Points of the fiber with the given label in the fiber's own coordinate order.
        """
        return flat_points(int(self.fiber_bases[label]), self.direction_basis, self.dimension)


def label_tuple(label, codimension):
    return tuple(int(value) for value in coordinate_table(codimension)[label])


def fiber_sizes(cap, fibration):
    """
    Number of cap points per label, array of length 3^c.
    """
    if cap.dimension != fibration.dimension:
        raise DimensionMismatchException("Fibration and cap dimensions differ.")
    if not cap.size:
        return np.zeros(point_count(fibration.codimension), dtype=np.int64)
    return np.bincount(fibration.labels(cap.points), minlength=point_count(fibration.codimension))


def fibers(cap, fibration):
    """
    Splits cap along the fibration; each fiber is re-coordinatised to dimension n - c.
    @param cap: CapSet
    @param fibration: Fibration of the same dimension
    @return: dict from value tuple to CapSet of dimension n - c
    """
    if cap.dimension != fibration.dimension:
        raise DimensionMismatchException("Fibration and cap dimensions differ.")
    sub_dimension = cap.dimension - fibration.codimension
    labels = fibration.labels(cap.points) if cap.size else np.empty(0, dtype=np.int64)
    result = {}
    for label in range(point_count(fibration.codimension)):
        members = [point for point, point_label in zip(cap.points, labels) if point_label == label]
        position = {int(point): index for index, point in enumerate(fibration.fiber_points(label))}
        result[label_tuple(label, fibration.codimension)] = CapSet.from_points(
            sub_dimension, [position[point] for point in members], check=False)
    return result


def embed_fiber(sub_cap, fibration, label):
    """
    Inverse of fibers(): places a cap of dimension n - c into the fiber with the given label.
    """
    fiber_points = fibration.fiber_points(label)
    return [int(fiber_points[point]) for point in sub_cap.points]
