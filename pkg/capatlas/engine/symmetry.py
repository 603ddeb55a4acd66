"""
Affine equivalence of caps: canonical forms, isomorphism tests, automorphism groups and orbits of directions.

The canonical form is found by colouring the cap points with affine invariants (refined to a fixpoint) and then
walking through ordered affine frames (q0, q1, ..., qn) of cap points level by level. A frame defines the map
y -> q0 + sum y_i (q_i - q0) with q_i sent to the standard point of index 3^(i-1); at level k the span of
q0..qk is sent onto the points with index < 3^k. Only frames with the least key survive each level, the key
being the colour of q_k followed by the non-membership of the new span points. Frames surviving the last level
differ by automorphisms, so they yield the automorphism group on the way.
"""

import functools
import itertools
import logging
from collections import Counter
from dataclasses import dataclass

import numpy as np

from capatlas.engine.directions import enumerate_directions, raw_counts
from capatlas.engine.geometry import (AffineMap, CapSet, affine_hull_dimension, coordinate_table, indices_of,
                                      mask_from_membership, pair_third_points, point_count, third_points)
from capatlas.models.exceptions import DimensionMismatchException, GeometryException, NotSpanningException

LOG = logging.getLogger("capatlas")
BRUTE_FORCE_LIMIT = 3


@dataclass(frozen=True)
class CanonicalCertificate:
    """
    canonical: the canonical cap; witness: map with witness(cap) = canonical; fingerprint: sizes of the refined
    colour classes in colour order; automorphisms: the full stabiliser of the cap.
    """
    canonical: CapSet
    witness: AffineMap
    fingerprint: tuple
    automorphisms: tuple

    def to_dict(self):
        return {"dimension": self.canonical.dimension,
                "size": self.canonical.size,
                "canonical": hex(self.canonical.mask),
                "witness": self.witness.to_dict(),
                "fingerprint": [list(entry) for entry in self.fingerprint],
                "automorphismGroupOrder": len(self.automorphisms)}


def _ranks(contents):
    """
    Colour of each entry: rank of its content among the sorted distinct contents.
    """
    order = {content: rank for rank, content in enumerate(sorted(set(contents)))}
    return [order[content] for content in contents]


def point_colours(cap, log=LOG):
    """
    Affine invariant colouring of the cap points (same order as cap.points).
    Start: multiset over all hyperplane directions of (size of the point's hyperplane, sorted triple).
    Refinement: multiset over the other points q of (colour of q, number of cap pairs whose third point is the
    third point of p and q), iterated until the number of colours is stable.
    """
    points = np.array(cap.points, dtype=np.int64)
    directions = enumerate_directions(cap.dimension, 1)
    counts = raw_counts(points, cap.dimension, directions)
    coords = coordinate_table(cap.dimension)[points]
    functionals = np.array([direction.basis[0] for direction in directions], dtype=np.int64)
    values = (coords @ functionals.T) % 3
    own = counts[np.arange(len(directions))[None, :], values]
    triples = np.sort(counts, axis=1)
    contents = []
    for row in own:
        contents.append(tuple(sorted(Counter(zip(row.tolist(), map(tuple, triples.tolist()))).items())))
    colours = _ranks(contents)

    line_counts = np.bincount(pair_third_points(points, cap.dimension), minlength=point_count(cap.dimension))
    first, second = np.meshgrid(np.arange(len(points)), np.arange(len(points)), indexing="ij")
    thirds = third_points(points[first.ravel()], points[second.ravel()], cap.dimension).reshape(len(points), -1)
    through = line_counts[thirds]
    rounds = 0
    while True:
        rounds += 1
        contents = []
        for index, row in enumerate(through):
            neighbours = sorted((colours[other], int(row[other])) for other in range(len(points)) if other != index)
            contents.append((colours[index], tuple(neighbours)))
        refined = _ranks(contents)
        if len(set(refined)) == len(set(colours)):
            break
        colours = refined
    log.debug("Colour refinement: %s colours after %s rounds.", len(set(colours)), rounds)
    return colours


def _frame_map(frame, dimension):
    """
    y -> q0 + sum y_i (q_i - q0), q_i placed at the coordinate of index 3^(i-1).
    """
    table = coordinate_table(dimension)
    origin = table[frame[0]]
    linear = np.zeros((dimension, dimension), dtype=np.int64)
    for level, point in enumerate(frame[1:], start=1):
        linear[:, dimension - level] = (table[point] - origin) % 3
    return AffineMap.trusted(linear.tolist(), origin.tolist())


def _least_rows(keys):
    """
    Boolean mask of the rows of keys (r, k) equal to the lexicographically least row.
    """
    alive = np.ones(len(keys), dtype=bool)
    for column in range(keys.shape[1]):
        values = np.where(alive, keys[:, column], np.iinfo(keys.dtype).max)
        alive &= values == values.min()
    return alive


def canonical_form(cap, log=LOG):
    """
    Canonical representative of the affine class of cap.
    @param cap: spanning CapSet
    @param log:
    @return: CanonicalCertificate
    """
    dimension = cap.dimension
    hull = affine_hull_dimension(cap.points, dimension)
    if hull < dimension:
        raise NotSpanningException(hull, dimension)
    table = coordinate_table(dimension)
    points = np.array(cap.points, dtype=np.int64)
    colours = np.array(point_colours(cap, log), dtype=np.int64)
    colour_of = dict(zip(points.tolist(), colours.tolist()))
    membership = cap.membership

    best_colour = colours.min()
    survivors = [((int(point),), table[[point]]) for point, colour in zip(points, colours) if colour == best_colour]
    for level in range(1, dimension + 1):
        candidate_frames = []
        candidate_keys = []
        for frame, span in survivors:
            span_indices = indices_of(span, dimension)
            outside = points[~np.isin(points, span_indices)]
            directions = (table[outside] - table[frame[0]]) % 3
            new = span[None, None, :, :] + np.array([1, 2])[None, :, None, None] * directions[:, None, None, :]
            new_indices = indices_of(new.reshape(len(outside), -1, dimension), dimension)
            keys = np.concatenate([np.array([colour_of[int(point)] for point in outside])[:, None],
                                   (~membership[new_indices]).astype(np.int64)], axis=1)
            candidate_keys.append(keys)
            candidate_frames.extend((frame, span, new[index], int(point)) for index, point in enumerate(outside))
        keys = np.concatenate(candidate_keys, axis=0)
        best = np.flatnonzero(_least_rows(keys))
        survivors = []
        for index in best:
            frame, span, new, point = candidate_frames[index]
            survivors.append((frame + (point,), np.concatenate([span, new.reshape(-1, dimension) % 3], axis=0)))
        log.debug("Canonical form level %s: %s frames kept of %s.", level, len(survivors), len(keys))

    base_map = _frame_map(survivors[0][0], dimension)
    witness = base_map.inverse()
    canonical = witness.apply(cap)
    automorphisms = tuple(_frame_map(frame, dimension).compose(witness) for frame, _ in survivors)
    fingerprint = tuple(sorted(Counter(colours.tolist()).items()))
    return CanonicalCertificate(canonical, witness, fingerprint, automorphisms)


def are_isomorphic(first, second, log=LOG):
    """
    @param first: CapSet
    @param second: CapSet of the same dimension
    @param log:
    @return: AffineMap m with m(first) = second, or None
    """
    if first.dimension != second.dimension:
        raise DimensionMismatchException("Caps of different dimensions can not be compared.")
    if first.size != second.size:
        return None
    first_hull = affine_hull_dimension(first.points, first.dimension)
    second_hull = affine_hull_dimension(second.points, second.dimension)
    if first_hull != second_hull:
        return None
    first_certificate = canonical_form(first, log)
    second_certificate = canonical_form(second, log)
    if first_certificate.canonical != second_certificate.canonical:
        return None
    return second_certificate.witness.inverse().compose(first_certificate.witness)


def automorphisms(cap, log=LOG):
    """
    Full stabiliser of cap in the affine group.
    """
    return list(canonical_form(cap, log).automorphisms)


def _kernel_keys(directions, dimension):
    """
    Membership (as bytes) of the fiber through the origin of every direction.
    """
    table = coordinate_table(dimension)
    kernels = []
    for direction in directions:
        kernels.append(((table @ np.array(direction.basis, dtype=np.int64).T) % 3 == 0).all(axis=1))
    return np.array(kernels, dtype=bool)


def direction_orbits(cap, directions, group=None, log=LOG):
    """
    Partition of directions into orbits of the automorphism group (directions not closed under the group are
    grouped with the images that are present).
    @param cap: CapSet
    @param directions: list of DirectionSpec of one codimension
    @param group: automorphisms, computed if None
    @param log:
    @return: list of orbits (lists of DirectionSpec), ordered by their least member
    """
    directions = sorted(directions)
    if not directions:
        return []
    group = automorphisms(cap, log) if group is None else group
    kernels = _kernel_keys(directions, cap.dimension)
    position = {np.packbits(kernel).tobytes(): index for index, kernel in enumerate(kernels)}
    parent = list(range(len(directions)))

    def find(index):
        while parent[index] != index:
            parent[index] = parent[parent[index]]
            index = parent[index]
        return index

    for element in group:
        linear = AffineMap.trusted(element.linear, (0,) * cap.dimension).permutation
        images = np.zeros_like(kernels)
        images[:, linear] = kernels
        for index, image in enumerate(images):
            other = position.get(np.packbits(image).tobytes())
            if other is not None:
                parent[find(index)] = find(other)
    orbits = {}
    for index, direction in enumerate(directions):
        orbits.setdefault(find(index), []).append(direction)
    return sorted(orbits.values())


def stabiliser_order(cap, direction, group):
    """
    Number of group elements mapping direction onto itself.
    """
    kernel = _kernel_keys([direction], cap.dimension)[0]
    order = 0
    for element in group:
        image = np.zeros_like(kernel)
        image[AffineMap.trusted(element.linear, (0,) * cap.dimension).permutation] = kernel
        order += bool((image == kernel).all())
    return order


@functools.lru_cache(maxsize=None)
def affine_group_permutations(dimension):
    """
    Permutation array of every element of AGL(n, 3), n <= 3.
    """
    if dimension > BRUTE_FORCE_LIMIT:
        raise GeometryException(f"Brute force over AGL({dimension}, 3) is not supported.")
    matrices = np.array(list(itertools.product(range(3), repeat=dimension * dimension)),
                        dtype=np.int64).reshape(-1, dimension, dimension)
    determinants = np.rint(np.linalg.det(matrices)).astype(np.int64) % 3
    matrices = matrices[determinants != 0]
    table = coordinate_table(dimension)
    linear_images = np.einsum("pj,gij->gpi", table, matrices)
    permutations = [indices_of(linear_images + translation, dimension) for translation in table]
    return np.concatenate(permutations, axis=0)


def brute_force_canonical(cap):
    """
    Lexicographically least image (members at the smallest indices) over all of AGL(n, 3); n <= 3 only.
    """
    permutations = affine_group_permutations(cap.dimension)
    images = np.zeros(permutations.shape, dtype=bool)
    rows = np.arange(len(permutations))[:, None]
    images[rows, permutations[:, list(cap.points)]] = True
    best = np.flatnonzero(_least_rows((~images).astype(np.int8)))[0]
    return CapSet(cap.dimension, mask_from_membership(images[best]))


def brute_force_automorphism_count(cap):
    permutations = affine_group_permutations(cap.dimension)
    images = np.zeros(permutations.shape, dtype=bool)
    images[np.arange(len(permutations))[:, None], permutations[:, list(cap.points)]] = True
    return int((images == cap.membership[None, :]).all(axis=1).sum())
