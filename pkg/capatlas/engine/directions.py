"""
Flat directions (subspaces of the dual space), their point counts and spectra, and the counting identities every
hyperplane spectrum satisfies.
"""

import functools
import itertools
import logging
from dataclasses import dataclass, field as dataclass_field
from math import comb

import numpy as np

from capatlas.core.utility import field
from capatlas.engine.geometry import coordinate_table, point_count
from capatlas.models.exceptions import DimensionMismatchException, GeometryException
from capatlas.models.return_threading import map_parallel

LOG = logging.getLogger("capatlas")

# order in which the values -1, 0, 1 of a functional are displayed
DISPLAY_ORDER = (2, 0, 1)
NORMALISATION_CHUNK = 512

# metadata of the standard diagrams of the 42-cap and 40-cap arguments, not interpreted
STANDARD_DIAGRAM_LINES = {"dim5-delta686": "121y = 4068x - 5237136", "dim5-40cap": "86y = 7793x - 70101168"}


@dataclass(frozen=True, order=True)
class DirectionSpec:
    """
    A direction of codimension c: the dual subspace spanned by basis, stored in reduced row echelon form.
    Two specs are equal iff they span the same dual subspace.
    """
    dimension: int
    basis: tuple

    @property
    def codim(self):
        return len(self.basis)

    def __str__(self):
        return "/".join("".join(str(value) for value in row) for row in self.basis)


def span_direction(functionals):
    """
    Direction spanned by independent functionals.
    @param functionals: rows over F_3
    @return: DirectionSpec in echelon form
    """
    functionals = [tuple(int(value) % 3 for value in row) for row in functionals]
    if not functionals:
        raise GeometryException("A direction needs at least one functional.")
    reduced, _ = field.rref(functionals)
    if len(reduced) != len(functionals):
        raise GeometryException(f"Functionals {functionals} are linearly dependent.")
    return DirectionSpec(len(functionals[0]), reduced)


def direction_count(dimension, codim):
    """
    Gaussian binomial coefficient [n choose c] at q = 3.
    """
    numerator = denominator = 1
    for i in range(codim):
        numerator *= 3 ** (dimension - i) - 1
        denominator *= 3 ** (i + 1) - 1
    return numerator // denominator


@functools.lru_cache(maxsize=None)
def enumerate_directions(dimension, codim):
    """
    All directions of the given codimension, sorted lexicographically by echelon basis.
    @param dimension: n
    @param codim: c with 1 <= c <= n
    @return: tuple of DirectionSpec
    """
    if not 1 <= codim <= dimension:
        raise GeometryException(f"Codimension {codim} out of range 1..{dimension}.")
    directions = []
    for pivots in itertools.combinations(range(dimension), codim):
        free_slots = [(row, column) for row, pivot in enumerate(pivots) for column in range(pivot + 1, dimension)
                      if column not in pivots]
        for values in itertools.product(range(3), repeat=len(free_slots)):
            rows = [[0] * dimension for _ in pivots]
            for row, pivot in enumerate(pivots):
                rows[row][pivot] = 1
            for (row, column), value in zip(free_slots, values):
                rows[row][column] = value
            directions.append(DirectionSpec(dimension, tuple(tuple(row) for row in rows)))
    return tuple(sorted(directions))


def functional_array(directions):
    """
    Array (m, c, n) of the direction bases.
    """
    return np.array([direction.basis for direction in directions], dtype=np.int64)


def raw_counts(points, dimension, directions):
    """
    Fiber sizes per direction with labels read in base 3 (coordinate order of the value tuple).
    @param points: point indices
    @param dimension: n
    @param directions: sequence of DirectionSpec of equal codimension
    @return: array (len(directions), 3^c)
    """
    if not directions:
        return np.zeros((0, 1), dtype=np.int64)
    codim = directions[0].codim
    if any(direction.dimension != dimension for direction in directions):
        raise DimensionMismatchException("Direction and point dimensions differ.")
    coords = coordinate_table(dimension)[np.asarray(points, dtype=np.int64)]
    values = np.einsum("pn,mcn->pmc", coords, functional_array(directions)) % 3
    labels = values @ (3 ** np.arange(codim - 1, -1, -1))
    counts = np.zeros((len(directions), point_count(codim)), dtype=np.int64)
    for label in range(point_count(codim)):
        counts[:, label] = (labels == label).sum(axis=0)
    return counts


def _display_position(label_pair):
    first, second = label_pair
    return 3 * DISPLAY_ORDER.index(first) + DISPLAY_ORDER.index(second)


@functools.lru_cache(maxsize=None)
def plane_relabellings():
    """
    The 432 elements of AGL(2,3) as permutations of the nine display positions of a 3x3 count matrix.
    """
    permutations = set()
    labels = [(DISPLAY_ORDER[position // 3], DISPLAY_ORDER[position % 3]) for position in range(9)]
    for entries in itertools.product(range(3), repeat=4):
        if (entries[0] * entries[3] - entries[1] * entries[2]) % 3 == 0:
            continue
        for shift in itertools.product(range(3), repeat=2):
            permutations.add(tuple(_display_position(((entries[0] * a + entries[1] * b + shift[0]) % 3,
                                                      (entries[2] * a + entries[3] * b + shift[1]) % 3))
                                   for a, b in labels))
    return np.array(sorted(permutations), dtype=np.int64)


def _lex_max_rows(candidates):
    """
    candidates (m, g, k): per m the lexicographically largest of the g rows.
    """
    alive = np.ones(candidates.shape[:2], dtype=bool)
    for column in range(candidates.shape[2]):
        values = np.where(alive, candidates[:, :, column], -1)
        alive &= values == values.max(axis=1, keepdims=True)
    return candidates[np.arange(len(candidates)), alive.argmax(axis=1)]


@dataclass(frozen=True, order=True)
class PointCountMatrix:
    """
    Normalised point counts of one direction. codim 1: descending triple; codim 2: the 3x3 matrix (display order
    -1, 0, 1) that is lexicographically largest over all affine relabellings of the label plane; codim >= 3:
    descending multiset.
    """
    codim: int
    entries: tuple

    def rows(self):
        if self.codim == 2:
            return [list(self.entries[i:i + 3]) for i in range(0, 9, 3)]
        return list(self.entries)

    def __str__(self):
        if self.codim == 2:
            return "[" + "; ".join(",".join(str(value) for value in row) for row in self.rows()) + "]"
        return "{" + ",".join(str(value) for value in self.entries) + "}"


def normalise_counts(counts, codim):
    """
    Normalises raw label counts (m, 3^c) into PointCountMatrix instances.
    """
    counts = np.asarray(counts, dtype=np.int64)
    if codim != 2:
        return [PointCountMatrix(codim, tuple(int(value) for value in sorted(row, reverse=True))) for row in counts]
    display = counts[:, [3 * first + second for first in DISPLAY_ORDER for second in DISPLAY_ORDER]]
    unique, inverse = np.unique(display, axis=0, return_inverse=True)
    relabellings = plane_relabellings()
    normalised = []
    for start in range(0, len(unique), NORMALISATION_CHUNK):
        chunk = unique[start:start + NORMALISATION_CHUNK]
        normalised.extend(_lex_max_rows(chunk[:, relabellings]))
    matrices = [PointCountMatrix(2, tuple(int(value) for value in row)) for row in normalised]
    return [matrices[index] for index in np.asarray(inverse).reshape(-1)]


def normalise_display_matrix(rows):
    """
    PointCountMatrix of a 3x3 matrix given in display order (rows and columns -1, 0, 1).
    """
    raw = [0] * 9
    for row_position, first in enumerate(DISPLAY_ORDER):
        for column_position, second in enumerate(DISPLAY_ORDER):
            raw[3 * first + second] = rows[row_position][column_position]
    return normalise_counts([raw], 2)[0]


def direction_point_count(cap, direction):
    """
    @param cap: CapSet
    @param direction: DirectionSpec of the same dimension
    @return: PointCountMatrix, entries sum to |cap|
    """
    if cap.dimension != direction.dimension:
        raise DimensionMismatchException(f"Cap of dimension {cap.dimension}, direction of dimension "
                                         f"{direction.dimension}.")
    return normalise_counts(raw_counts(cap.points, cap.dimension, [direction]), direction.codim)[0]


def point_count_matrix(cap, first, second, constants=(0, 0)):
    """
    Raw 3x3 matrix of fiber sizes: rows by the value of first, columns by the value of second, both in the order
    -1, 0, 1.
    """
    coords = cap.coordinates()
    first_values = (coords @ np.array(first) + constants[0]) % 3
    second_values = (coords @ np.array(second) + constants[1]) % 3
    return [[int(((first_values == a) & (second_values == b)).sum()) for b in DISPLAY_ORDER] for a in DISPLAY_ORDER]


@dataclass
class SpectrumReport:
    """
    Census of normalised point counts over all directions of one codimension.
    """
    dimension: int
    codim: int
    census: dict = dataclass_field(default_factory=dict)

    @property
    def total(self):
        return sum(self.census.values())

    def multiplicity(self, entries):
        return self.census.get(PointCountMatrix(self.codim, tuple(entries)), 0)

    def to_dict(self):
        return {"dim": self.dimension, "codim": self.codim,
                "census": [{"count": list(key.entries), "multiplicity": multiplicity}
                           for key, multiplicity in sorted(self.census.items())]}

    def lines(self):
        return [f"{key}: {multiplicity}" for key, multiplicity in sorted(self.census.items(), reverse=True)]


def direction_counts(cap, codim, threads=1):
    """
    Normalised point count of every direction, in enumeration order.
    @return: list of (DirectionSpec, PointCountMatrix)
    """
    directions = enumerate_directions(cap.dimension, codim)

    def count_chunk(chunk):
        return list(zip(chunk, normalise_counts(raw_counts(cap.points, cap.dimension, chunk), codim)))

    return map_parallel(count_chunk, directions, threads)


def spectrum(cap, codim, threads=1, log=LOG):
    """
    Census over all directions of codimension codim.
    @param cap: CapSet
    @param codim: c
    @param threads: worker threads
    @param log:
    @return: SpectrumReport with keys in sorted order
    """
    log.debug("Computing codim %s spectrum of a %s-cap in dimension %s.", codim, cap.size, cap.dimension)
    census = {}
    for _, key in direction_counts(cap, codim, threads):
        census[key] = census.get(key, 0) + 1
    return SpectrumReport(cap.dimension, codim, dict(sorted(census.items())))


def directions_with_count(cap, codim, entries, threads=1):
    """
    All directions whose normalised count equals entries.
    """
    wanted = PointCountMatrix(codim, tuple(entries))
    return [direction for direction, key in direction_counts(cap, codim, threads) if key == wanted]


def moment_identities(report, size, dimension):
    """
    Double counting of points and of point pairs over all hyperplane directions.
    @param report: codim 1 SpectrumReport
    @param size: number of points s
    @param dimension: n
    @return: (ok, diagnostic)
    """
    if report.codim != 1:
        return False, f"moment identities need a codim 1 spectrum, got codim {report.codim}"
    points = sum(sum(key.entries) * multiplicity for key, multiplicity in report.census.items())
    expected_points = size * (3 ** dimension - 1) // 2
    if points != expected_points:
        return False, f"point identity violated: sum of counts {points} != s(3^n-1)/2 = {expected_points}"
    pairs = sum(sum(comb(value, 2) for value in key.entries) * multiplicity
                for key, multiplicity in report.census.items())
    expected_pairs = comb(size, 2) * (3 ** (dimension - 1) - 1) // 2
    if pairs != expected_pairs:
        return False, f"pair identity violated: sum of C(a,2) {pairs} != C(s,2)(3^(n-1)-1)/2 = {expected_pairs}"
    return True, f"both identities hold ({points} points, {pairs} pairs)"


def transform_direction(direction, affine_map):
    """
    Image of a direction under an affine map: functionals f become f . A^-1.
    """
    inverse = field.inverse(affine_map.linear)
    return span_direction(field.multiply(direction.basis, inverse))


def contains_functional(direction, functional):
    """
    True iff functional lies in the dual subspace of direction.
    """
    return field.rank(list(direction.basis) + [tuple(functional)]) == direction.codim


def intersection_direction(first, second):
    """
    Direction of the intersection of two hyperplane directions (span of both functionals).
    """
    return span_direction([first.basis[0], second.basis[0]])
