"""
Builds the representative caps by search and derivation. Nothing is transcribed: every cap is found by a seeded
search or combined from caps found that way, and checked against the structure it has to have.
"""

import itertools
import logging
from dataclasses import dataclass, field as dataclass_field

from capatlas.atlas import features as atlas_features
from capatlas.engine.directions import enumerate_directions, raw_counts, spectrum
from capatlas.engine.geometry import (AffineMap, CapSet, Fibration, brute_force_is_cap, fibers, index_of,
                                      is_complete, point_count)
from capatlas.engine.placements import enumerate_placements, placement_union, recoordinatise
from capatlas.engine.search import extend_dfs, midpoint_profile, stack_levels
from capatlas.engine.symmetry import canonical_form, direction_orbits
from capatlas.models.exceptions import SearchFailureException

LOG = logging.getLogger("capatlas")

# fiber targets by (x1, x2) value of the distinguished pair, values read mod 3
TARGETS_882 = {(0, 0): 0, (0, 1): 4, (0, 2): 4, (1, 0): 1, (2, 0): 1,
               (1, 1): 2, (1, 2): 2, (2, 1): 2, (2, 2): 2}
SEARCH_LIMITS_882 = (64, 1024, 16384)
TARGETS_45 = {(2,): 18, (0,): 9, (1,): 18}
TARGETS_DELTA686 = {(2,): 16, (0,): 6, (1,): 20}
TARGETS_20 = {(0,): 9, (1,): 9, (2,): 2}
SEARCH_LIMITS_DELTA686 = (1, 16, 256)

DELTA686_SPECTRUM = {(20, 16, 6): 3, (18, 18, 6): 4, (18, 17, 7): 18, (18, 12, 12): 6,
                     (16, 15, 11): 24, (16, 14, 12): 36, (15, 15, 12): 3, (14, 14, 14): 27}


def affine_group_order(dimension):
    """
    |AGL(n, 3)|
    """
    order = point_count(dimension)
    for i in range(dimension):
        order *= point_count(dimension) - 3 ** i
    return order


def unit_functional(axis, dimension):
    return tuple(1 if column == axis else 0 for column in range(dimension))


def hyperplane_census(cap):
    """
    Sorted hyperplane point counts (descending triples) with their multiplicities.
    """
    return {key.entries: multiplicity for key, multiplicity in spectrum(cap, 1).census.items()}


@dataclass
class FiveCapClassification:
    """
    Affine classes of the 5-caps of dimension 3 with the evidence that the list is complete.
    """
    certificates: dict = dataclass_field(default_factory=dict)
    labelled: int = 0
    brute_force: int = 0

    def orbit_sizes(self):
        group = affine_group_order(3)
        return {name: group // len(certificate.automorphisms) for name, certificate in self.certificates.items()}

    def is_complete(self):
        return self.labelled == self.brute_force == sum(self.orbit_sizes().values())


def classify_dim3_5caps(log=LOG):
    """
    All 5-caps of dimension 3: exhaustive search, split into square pyramids and tetrahedra plus centre, one
    certificate per class. The orbit sizes |AGL(3,3)| / |Aut| add up to the labelled count iff no other class
    exists.
    @param log:
    @return: FiveCapClassification with classes "pyramid" and "tetracentre"
    """
    caps, _ = extend_dfs(CapSet.empty(3), 5, log=log)
    classification = FiveCapClassification(labelled=len(caps))
    classification.brute_force = sum(brute_force_is_cap(points, 3) for points in itertools.combinations(range(27), 5))
    for cap in caps:
        name = "pyramid" if atlas_features.is_pyramid(cap) else "tetracentre"
        if name not in classification.certificates:
            classification.certificates[name] = canonical_form(cap, log)
    log.info("5-caps of dimension 3: %s labelled, %s by brute force, orbit sizes %s.", classification.labelled,
             classification.brute_force, classification.orbit_sizes())
    return classification


def nine_cap(log=LOG):
    caps, _ = extend_dfs(CapSet.empty(3), 9, limit=1, log=log)
    if not caps:
        raise SearchFailureException("No 9-cap found in dimension 3.")
    return canonical_form(caps[0], log).canonical


def twenty_cap(log=LOG):
    """
    A 20-cap 4-flat, searched from an affine frame; first with a {9,9,2} hyperplane split, then without targets.
    """
    seed = CapSet.from_points(4, [0, 1, 3, 9, 27])
    caps, _ = extend_dfs(seed, 20, Fibration((unit_functional(0, 4),)), TARGETS_20, limit=1, log=log)
    if not caps:
        log.info("No 20-cap with a {9,9,2} split through the frame, searching without targets.")
        caps, _ = extend_dfs(seed, 20, limit=1, log=log)
    if not caps:
        raise SearchFailureException("No 20-cap found in dimension 4.")
    return canonical_form(caps[0], log).canonical


def standard_square_seed():
    """
    A 4-cap in the 2-flat (x1, x2) = (0, -1) of dimension 4.
    """
    return CapSet.from_points(4, [index_of((0, 2, a, b)) for a, b in itertools.product((0, 1), repeat=2)])


def build_882A2_candidate(log=LOG):
    """
    18-caps of dimension 4 with the distinguished point count for (x1, x2), seeded with a standard square;
    returns the first one with all 882A2 properties.
    """
    fibration = Fibration((unit_functional(0, 4), unit_functional(1, 4)))
    for limit in SEARCH_LIMITS_882:
        caps, nodes = extend_dfs(standard_square_seed(), 18, fibration, TARGETS_882, limit=limit, log=log)
        log.info("882A2 search with limit %s: %s candidates after %s nodes.", limit, len(caps), nodes)
        for cap in caps:
            if atlas_features.analyze_882A2(cap, log).is_882A2():
                return cap
        if len(caps) < limit:
            break
    raise SearchFailureException("No 18-cap 4-flat with the 882A2 properties found.")


def build_45cap(seed_882, log=LOG):
    """
    Completes an 882A2 at level -1 to a 45-cap 5-flat with level counts (18, 9, 18).
    """
    seed = stack_levels({-1: seed_882})
    caps, nodes = extend_dfs(seed, 45, Fibration((unit_functional(0, 5),)), TARGETS_45, limit=1, log=log)
    if not caps:
        raise SearchFailureException(f"No 45-cap completes the 882A2 seed ({nodes} nodes).")
    cap = caps[0]
    if not is_complete(cap):
        raise SearchFailureException("45-cap found by the search is not complete.")
    return canonical_form(cap, log).canonical


def reference_882A2(cap45, log=LOG):
    """
    Canonical 18-cap of the class filling both 18-fibers in the most {18,9,18} directions of a 45-cap (45 for
    the 882A2, 10 for the other class).
    """
    classes = {}
    for direction in enumerate_directions(cap45.dimension, 1):
        _, parts = atlas_features.reference_fiber(cap45, direction)
        if len(parts) != 2:
            continue
        keys = [canonical_form(part, log).canonical for part in parts]
        if keys[0] == keys[1]:
            classes[keys[0]] = classes.get(keys[0], 0) + 1
    if not classes:
        raise SearchFailureException("45-cap has no {18,9,18} direction with two isomorphic 18-caps.")
    best = max(sorted(classes, key=lambda cap: cap.mask), key=lambda cap: classes[cap])
    log.info("18-cap classes in {18,9,18} directions: %s.", sorted(classes.values()))
    return best


def point_reflection_pair(cap45):
    """
    The 45-cap, its point reflection through the origin and the middle points blocked by no cross line.
    """
    reflected = AffineMap.trusted([[2 if row == column else 0 for column in range(cap45.dimension)]
                                   for row in range(cap45.dimension)], (0,) * cap45.dimension).apply(cap45)
    profile = midpoint_profile(cap45, reflected)
    return reflected, profile.addable_middle()


def build_112cap(cap45, log=LOG):
    """
    45-cap at level -1, its point reflection at level +1 and the middle points with n(Q) = 0 (a cap of 22 points).
    """
    reflected, middle = point_reflection_pair(cap45)
    middle_cap = CapSet.from_points(cap45.dimension, middle, check=False)
    if len(middle) != 22 or not middle_cap.is_valid():
        raise SearchFailureException(f"Point reflection pair leaves {len(middle)} free middle points, expected a "
                                     f"22-cap.")
    union = stack_levels({-1: cap45, 0: middle_cap, 1: reflected})
    if union.size != 112 or not union.is_valid() or not is_complete(union):
        raise SearchFailureException("Union of the point reflection pair is not a complete 112-cap.")
    log.info("112-cap built from a 45-cap and its point reflection.")
    return canonical_form(union, log).canonical


def placement_base(cap45, direction):
    """
    The 45-cap recoordinatised so that the functional of direction is the first coordinate.
    """
    base, _ = recoordinatise(cap45, [direction.basis[0]])
    return base


def sixes(cap45, direction, threads=1, log=LOG):
    """
    Fiber-aligned placements over the given {18,9,18} direction with (n0, n2) = (6, 6) and their unions.
    """
    placements = enumerate_placements(placement_base(cap45, direction), "fiber-aligned", threads=threads, log=log)
    found = []
    for placement in placements:
        statistics = midpoint_profile(placement.base, placement.image).statistics()
        if statistics == (6, 6):
            found.append((placement, placement_union(placement)))
    return found


def build_96cap(cap45, direction, threads=1, log=LOG):
    """
    Union of a (6, 6) placement: both 45-caps and the six free middle points. All such unions must share one
    canonical form.
    """
    found = sixes(cap45, direction, threads, log)
    if not found:
        raise SearchFailureException("No fiber-aligned placement with (n0, n2) = (6, 6).")
    canonical = set()
    for placement, union in found:
        if union.size != 96 or not union.is_valid() or not is_complete(union):
            raise SearchFailureException(f"Placement {placement.index} does not give a complete 96-cap.")
        canonical.add(canonical_form(union, log).canonical)
    if len(canonical) != 1:
        raise SearchFailureException(f"(6, 6) placements give {len(canonical)} classes of 96-caps.")
    return canonical.pop()


def build_delta686(cap20, log=LOG):
    """
    20-cap at level +1 completed with level counts (16, 6, 20); the first complete 42-cap with the Delta686
    hyperplane census.
    """
    seed = stack_levels({1: cap20})
    fibration = Fibration((unit_functional(0, 5),))
    for limit in SEARCH_LIMITS_DELTA686:
        caps, nodes = extend_dfs(seed, 42, fibration, TARGETS_DELTA686, limit=limit, log=log)
        log.info("Delta686 search with limit %s: %s candidates after %s nodes.", limit, len(caps), nodes)
        for cap in caps:
            if is_complete(cap) and hyperplane_census(cap) == DELTA686_SPECTRUM:
                return canonical_form(cap, log).canonical
        if len(caps) < limit:
            break
    raise SearchFailureException("No complete 42-cap with the Delta686 hyperplane census found.")


def forty_cap_direction(cap112):
    """
    First {40,36,36} hyperplane direction of a 112-cap.
    """
    directions = enumerate_directions(cap112.dimension, 1)
    for direction, row in zip(directions, raw_counts(cap112.points, cap112.dimension, directions)):
        if sorted(row.tolist()) == [36, 36, 40]:
            return direction
    raise SearchFailureException("112-cap has no {40,36,36} direction.")


def extract_40cap(cap112, log=LOG):
    """
    The 40-cap 5-flat of a {40,36,36} hyperplane direction of a 112-cap.
    """
    direction = forty_cap_direction(cap112)
    parts = fibers(cap112, Fibration(direction.basis))
    cap40 = next(part for part in parts.values() if part.size == 40)
    log.info("40-cap taken from direction %s.", direction)
    return canonical_form(cap40, log).canonical


@dataclass
class FortyCapReport:
    """
    {18,18,4} directions of a 40-cap, their orbits under its automorphisms and whether all their 18-caps are
    882A2.
    """
    directions: list
    orbits: list
    fibers_882: bool


def forty_cap_report(cap40, reference, log=LOG):
    directions = enumerate_directions(cap40.dimension, 1)
    counts = raw_counts(cap40.points, cap40.dimension, directions)
    chosen = [direction for direction, row in zip(directions, counts) if sorted(row.tolist()) == [4, 18, 18]]
    orbits = direction_orbits(cap40, chosen, log=log)
    key = atlas_features.class_key(reference, log)
    fibers_882 = all(atlas_features.class_key(part, log) == key for direction in chosen
                     for part in atlas_features.reference_fiber(cap40, direction)[1])
    return FortyCapReport(chosen, orbits, fibers_882)
