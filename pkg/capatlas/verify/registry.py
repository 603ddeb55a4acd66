"""
The check registry: every computer-checked claim with its expected value, provenance and runtime class.
A check function takes a CheckContext and returns (observed, witness); the table below holds what observed must equal.
"""

import itertools
from dataclasses import dataclass
from math import comb

from capatlas.atlas import builders
from capatlas.atlas import features as atlas_features
from capatlas.core.utility import field
from capatlas.engine.directions import (direction_count, directions_with_count, enumerate_directions,
                                        moment_identities, normalise_display_matrix, span_direction, spectrum)
from capatlas.engine.geometry import CapSet, Fibration, third_on_line, translation
from capatlas.engine.placements import is_point_reflection, is_translation, placement_union, translation_vector
from capatlas.engine.search import contains_maximal_hyperplane_cap, midpoint_profile, replace_points
from capatlas.engine.symmetry import canonical_form, direction_orbits
from capatlas.models.exceptions import UnknownCheckException
from capatlas.models.reports import Expected

RUNTIMES = ("fast", "medium", "long")

CODIM2_CLASS_MATRICES = ([[18, 9, 18], [9, 4, 9], [18, 9, 18]], [[15, 6, 15], [15, 10, 15], [15, 6, 15]],
                         [[12, 12, 12], [12, 16, 12], [12, 12, 12]])
# reference counts of the four exceptional placement classes
PLACEMENT_CASES = {(0, 45): 8, (22, 22): 8, (6, 6): 32, (2, 14): 176}
MOMENT_CAPS = ("dim3-9cap", "dim4-20cap", "dim5-45cap", "dim6-112cap")
PROPERTIES_882 = ("nineTwosUnique", "cube855Unique", "cube882Unique", "distinguishedPair", "standardSquares",
                  "squareOfMidpoints", "planeOfSquare")


@dataclass(frozen=True)
class Check:
    """
    id: registry key; dependencies: atlas entries; runtime: fast, medium or long.
    function maps a CheckContext to (observed, witness); the check passes iff observed equals expected.value.
    """
    id: str
    dependencies: tuple
    expected: Expected
    runtime: str
    function: object

    def run(self, context):
        observed, witness = self.function(context)
        return observed == self.expected.value, observed, witness


def _key(pair):
    return f"({pair[0]},{pair[1]})"


def check_direction_counts(_context):
    observed = {f"{n},{c}": len(enumerate_directions(n, c)) for n, c in ((5, 1), (6, 1), (6, 2))}
    formula = {f"{n},{c}": direction_count(n, c) for n, c in ((5, 1), (6, 1), (6, 2))}
    return observed, formula


def check_moments(context):
    observed = {}
    for name in MOMENT_CAPS:
        cap = context.cap(name)
        ok, diagnostic = moment_identities(spectrum(cap, 1, context.threads), cap.size, cap.dimension)
        observed[name] = diagnostic if not ok else "ok"
    return observed, None


def check_manifest(context):
    problems = context.atlas.cache.verify()
    return {"problems": len(problems)}, [list(problem) for problem in problems] or None


def check_45_census(context):
    features = context.features45
    orbits = {category: len(direction_orbits(context.cap45, directions, context.group45, context.log))
              for category, directions in features.categories.items() if directions}
    return {"census": features.census(), "orbits": orbits}, None


def check_45_three_flats(context):
    features = context.features45
    observed = {"special": len(features.special_directions), "axisDimension": len(features.axis_basis)}
    return observed, [list(row) for row in features.axis_basis]


def _replacement_check(k):
    def check(context):
        solutions = replace_points(context.cap882, k, contains_maximal_hyperplane_cap, log=context.log)
        nontrivial = [(removed, added) for removed, added in solutions if set(removed) != set(added)]
        witness = [list(part) for part in nontrivial[0]] if nontrivial else None
        return {"solutions": len(solutions), "nontrivial": len(nontrivial)}, witness
    return check


def check_replacement_k4(context):
    solutions = replace_points(context.cap882, 4, contains_maximal_hyperplane_cap, stop_after_nontrivial=True,
                               log=context.log)
    nontrivial = [(removed, added) for removed, added in solutions if set(removed) != set(added)]
    witness = [list(part) for part in nontrivial[0]] if nontrivial else None
    return {"nontrivialExists": bool(nontrivial)}, witness


def check_882_features(context):
    features = context.features882
    return features.properties(), features.to_report().model_dump(exclude_none=True)


def check_parallelism(context):
    directions = context.features45.categories["ii"]
    failures = atlas_features.lemma_2_4_parallelism(context.cap45, directions, context.log)
    witness = [[str(direction), problems] for direction, problems in failures] or None
    return {"directions": len(directions), "failures": len(failures)}, witness


def _tagged(profile, point):
    """
    Endpoints of the segments through point, tagged with their level.
    """
    return {(-1, first) for first, _ in profile.segments(point)} | {(1, second) for _, second in
                                                                     profile.segments(point)}


def overlapping_segments(profile, points):
    """
    @return: the first two points whose segments share an endpoint, or None
    """
    owner = {}
    for point in points:
        for end in _tagged(profile, point):
            if owner.get(end, point) != point:
                return owner[end], point
            owner[end] = point
    return None


def _disjoint_segments(profile, points, per_point=2):
    segments = sum(len(profile.segments(point)) for point in points)
    return segments == per_point * len(points) and overlapping_segments(profile, points) is None


def _small_histogram(profile):
    return {value: len(profile.points_with(value)) for value in range(4)}


def check_translation_pair(context):
    cap = context.cap882
    features = context.features882
    profile = midpoint_profile(cap, cap)
    twos = profile.points_with(2)
    nine_twos = Fibration(features.nine_twos[0].basis) if features.nine_twos else None
    observed = {
        "histogram": _small_histogram(profile),
        "onesAreCap": profile.points_with(1) == cap.points,
        "twosAreSquareOfMidpoints": tuple(sorted(twos)) == tuple(sorted(features.square_of_midpoints)),
        "disjointSegments": _disjoint_segments(profile, twos),
        "transversal": nine_twos is not None and all(
            len(set(nine_twos.labels(profile.endpoints(point, side)).tolist())) == 2
            for point in twos for side in (-1, 1)),
        "midpointOfImage": all(len(ends) == 2 and third_on_line(*ends, cap.dimension) == point
                               for point in twos for ends in (profile.endpoints(point, side) for side in (-1, 1)))}
    return observed, None


def _intersection_conditions(profile):
    """
    Pairs of points with two and three segments, and pairs of points with three segments, meet as required.
    @return: list of failing pairs
    """
    failures = []
    twos = profile.points_with(2)
    threes = profile.points_with(3)
    for two, three in itertools.product(twos, threes):
        common = _tagged(profile, two) & _tagged(profile, three)
        if len(common) <= 1:
            continue
        levels = sorted(common)
        if not (len(levels) == 2 and levels[0][0] == -1 and levels[1][0] == 1
                and third_on_line(levels[0][1], levels[1][1], profile.dimension) == three):
            failures.append([two, three])
    seen = {}
    for first, second in itertools.combinations(threes, 2):
        common = frozenset(_tagged(profile, first) & _tagged(profile, second))
        if len(common) <= 2:
            continue
        if len(common) != 3 or common in seen or profile.n(third_on_line(first, second, profile.dimension)):
            failures.append([first, second])
        seen[common] = (first, second)
    return failures


def check_reflection_pair(context):
    cap = context.cap882
    reflected = builders.point_reflection_pair(cap)[0]
    features = context.features882
    reflected_features = atlas_features.analyze_882A2(reflected, context.log)
    profile = midpoint_profile(cap, reflected)
    som = CapSet.from_points(4, features.square_of_midpoints, check=False)
    reflected_som = CapSet.from_points(4, reflected_features.square_of_midpoints, check=False)
    shift = translation_vector(som, reflected_som)
    twos = CapSet.from_points(4, profile.points_with(2), check=False)
    squares = [CapSet.from_points(4, square, check=False)
               for square in features.standard_squares + reflected_features.standard_squares]
    centre = atlas_features.square_centre(twos.points, 4) if atlas_features.is_square(twos.points, 4) else None
    reflected_centre = atlas_features.square_centre(reflected_som.points, 4)
    failures = _intersection_conditions(profile)
    observed = {
        "histogram": _small_histogram(profile),
        "zerosAreShiftedSquare": shift is not None
                                 and translation(shift).apply(reflected_som).points == profile.points_with(0),
        "disjointSegments": _disjoint_segments(profile, twos.points),
        "twosTranslateStandardSquares": centre is not None and all(
            translation_vector(square, twos) is not None for square in squares),
        "centreShifted": shift is not None and centre is not None and reflected_centre is not None
                         and translation(shift).apply_point(reflected_centre) == centre,
        "intersections": len(failures)}
    return observed, failures or None


def check_112_census(context):
    return {str(list(key)): value for key, value in builders.hyperplane_census(context.cap112).items()}, None


def check_112_differences(context):
    """
    Every {40,36,36} direction is the direction of y1 - y2 for two independent {45,45,22} coordinates.
    """
    functionals = context.functionals112
    spans = set()
    for first, second in itertools.combinations(functionals, 2):
        for sign in (1, 2):
            spans.add(field.normalize_vector(tuple((a - sign * b) % 3 for a, b in zip(first, second))))
    targets = [direction.basis[0] for direction in directions_with_count(context.cap112, 1, (40, 36, 36),
                                                                         context.threads)]
    missing = [list(functional) for functional in targets if functional not in spans]
    return {"directions": len(targets), "covered": len(targets) - len(missing)}, missing[:1] or None


def check_112_codim2(context):
    report = spectrum(context.cap112, 2, context.threads, context.log)
    counts = {str(matrix): report.census.get(normalise_display_matrix(matrix), 0)
              for matrix in CODIM2_CLASS_MATRICES}
    counts["other"] = report.total - sum(counts.values())
    return counts, None


def check_112_pairs(context):
    functionals = context.functionals112
    spans = {span_direction([first, second]) for first, second in itertools.combinations(functionals, 2)}
    key = normalise_display_matrix(CODIM2_CLASS_MATRICES[0])
    case_one = set(directions_with_count(context.cap112, 2, key.entries, context.threads))
    witness = [str(direction) for direction in sorted(spans ^ case_one)[:1]] or None
    return {"pairs": len(spans), "caseOne": len(case_one), "equal": spans == case_one}, witness


def check_dual_design(context):
    features = context.features45
    design = atlas_features.dual_design(context.cap45, features.categories["ii"], context.threads, context.log)
    observed = {
        "size": design.size,
        "census": {str(list(key.entries)): value for key, value in design.report.census.items()},
        "emptyIsAxis": design.empty_direction is not None and features.axis is not None
                       and atlas_features.axis_matches(design.empty_direction, features.axis),
        "matrices": sum(matrix in atlas_features.DUAL_MATRICES for _, matrix in design.matrices),
        "flatFailures": len(design.flat_failures)}
    witness = [[str(direction), list(label), problem] for direction, label, problem in design.flat_failures[:1]]
    return observed, witness or None


def _placement_case(statistics):
    if statistics in PLACEMENT_CASES:
        return _key(statistics)
    return "small" if statistics[0] <= 5 and statistics[1] <= 13 else "unexpected"


def check_placement_cases(context):
    """
    Every placement is one of the exceptional cases or small; each exceptional case occurs.
    """
    census = {}
    wrong_kind = []
    for placement in context.placements45:
        statistics = midpoint_profile(placement.base, placement.image).statistics()
        case = _placement_case(statistics)
        census[case] = census.get(case, 0) + 1
        if statistics == (0, 45) and not is_translation(placement.base, placement.image):
            wrong_kind.append(placement.index)
        if statistics == (22, 22) and not is_point_reflection(placement.base, placement.image):
            wrong_kind.append(placement.index)
    cases = [_key(case) for case in PLACEMENT_CASES]
    observed = {"present": [case for case in cases if census.get(case)], "unexpected": census.get("unexpected", 0),
                "wrongKind": len(wrong_kind)}
    witness = {"placements": len(context.placements45), "census": dict(sorted(census.items())),
               "missing": [case for case in cases if not census.get(case)], "wrongKind": wrong_kind[:1],
               "reference": {_key(case): count for case, count in PLACEMENT_CASES.items()}}
    return observed, witness


def check_placement_112(context):
    reference = context.cap112
    results = []
    for placement in context.placements45:
        if midpoint_profile(placement.base, placement.image).statistics() == (22, 22):
            union = placement_union(placement)
            results.append(union.size == 112 and union.is_valid()
                           and canonical_form(union, context.log).canonical == reference)
    return {"found": bool(results), "all112": all(results)}, {"placements": len(results)}


def check_placement_96(context):
    cap96 = context.cap("dim6-96cap")
    found = builders.sixes(context.cap45, context.atlas.ii_direction(), context.threads, context.log)
    classes = {canonical_form(union, context.log).canonical for _, union in found}
    observed = {"found": bool(found), "classes": len(classes), "matchesAtlas": classes == {cap96},
                "direction454506": bool(directions_with_count(cap96, 1, (45, 45, 6), context.threads))}
    return observed, {"placements": len(found)}


def check_forty_cap(context):
    report = builders.forty_cap_report(context.cap("dim5-40cap"), context.cap882, context.log)
    return {"directions": len(report.directions), "orbits": len(report.orbits),
            "fibers882A2": report.fibers_882}, None


def check_delta686_directions(context):
    cap = context.cap("dim5-delta686")
    directions = directions_with_count(cap, 1, (20, 16, 6), context.threads)
    return {"directions": len(directions), "orbits": len(direction_orbits(cap, directions, log=context.log))}, None


def check_delta686_table(context):
    """
    Hyperplane census of the Delta686; no 42-cap obtained by removing three points of the 45-cap shares it.
    """
    cap = context.cap("dim5-delta686")
    census = builders.hyperplane_census(cap)
    cap45 = context.cap45
    removals = 0
    collisions = []
    for removed in itertools.combinations(cap45.points, 3):
        removals += 1
        if builders.hyperplane_census(cap45.with_points(removed=removed, check=False)) == census:
            collisions.append(list(removed))
    observed = {"census": {str(list(key)): value for key, value in census.items()}, "removals": removals,
                "collisions": len(collisions)}
    return observed, collisions[:1] or None


def check_option_one(context):
    """
    Shift placements of a 112-cap: no free middle point; at most two points on at most two segments unless the
    image is a translation, then exactly the translated cap, each on one segment, the segments pairwise disjoint.
    """
    failures = []
    translations = 0
    for placement in context.shift_placements112:
        profile = midpoint_profile(placement.base, placement.image)
        n0, n2 = profile.statistics()
        shift = translation_vector(placement.base, placement.image)
        if n0:
            failures.append([placement.index, "free"])
        if shift is None:
            if n2 > 2:
                failures.append([placement.index, "n2"])
            continue
        translations += 1
        ones = profile.points_with(1)
        if n2 != 112 or ones != translation(shift).apply(placement.image).points or profile.points_with(2):
            failures.append([placement.index, "translation"])
        overlap = overlapping_segments(profile, ones)
        if overlap is not None:
            failures.append([placement.index, "overlap", list(overlap)])
    observed = {"placements": len(context.shift_placements112), "failures": len(failures)}
    return observed, {"translations": translations, "failures": failures[:1]}


def _expected(value, provenance, quote=None):
    return Expected(value=value, provenance=provenance, quote=quote)


CHECKS = {check.id: check for check in (
    Check("D-counts", (), _expected({"5,1": 121, "6,1": 364, "6,2": 11011}, "TRIVIAL"), "fast",
          check_direction_counts),
    Check("moments", MOMENT_CAPS, _expected({name: "ok" for name in MOMENT_CAPS}, "TRIVIAL"), "fast",
          check_moments),
    Check("atlas-manifest", (), _expected({"problems": 0}, "TRIVIAL"), "fast", check_manifest),
    Check("L2.2-census", ("dim5-45cap", "dim4-882A2"),
          _expected({"census": {"i": 10, "ii": 45, "iii": 30, "iv": 36, "other": 0},
                     "orbits": {"i": 1, "ii": 1, "iii": 1, "iv": 1}}, "PAPER",
                    "exactly 10 ... exactly 45 ... exactly 30 ... exactly 36"), "medium", check_45_census),
    Check("L2.2-3flats", ("dim5-45cap",), _expected({"special": 45, "axisDimension": 1}, "PAPER",
                                                    "eight square pyramids and one tetrahedron plus centre"),
          "medium", check_45_three_flats),
    Check("L2.3-k1", ("dim4-882A2",), _expected({"solutions": 18, "nontrivial": 0}, "PAPER", "binom{18}{1}"),
          "fast", _replacement_check(1)),
    Check("L2.3-k2", ("dim4-882A2",), _expected({"solutions": 153, "nontrivial": 0}, "PAPER", "binom{18}{2}"),
          "fast", _replacement_check(2)),
    Check("L2.3-k3", ("dim4-882A2",), _expected({"solutions": 816, "nontrivial": 0}, "PAPER", "binom{18}{3}"),
          "medium", _replacement_check(3)),
    Check("L2.3-k4", ("dim4-882A2",), _expected({"nontrivialExists": True}, "PAPER",
                                                "for n = 4, additional solutions do exist"),
          "long", check_replacement_k4),
    Check("A882-features", ("dim4-882A2",), _expected({name: True for name in PROPERTIES_882}, "PAPER",
                                                      "exactly one 2-flat direction"), "fast", check_882_features),
    Check("L2.4", ("dim5-45cap", "dim4-882A2"), _expected({"directions": 45, "failures": 0}, "PAPER",
                                                          "are parallel"), "medium", check_parallelism),
    Check("L2.5a", ("dim4-882A2",), _expected(
        {"histogram": {0: 0, 1: 18, 2: 4, 3: 0}, "onesAreCap": True, "twosAreSquareOfMidpoints": True,
         "disjointSegments": True, "transversal": True, "midpointOfImage": True}, "PAPER",
        "exactly 18 points Q with n(Q) = 1"), "fast", check_translation_pair),
    Check("L2.5b", ("dim4-882A2",), _expected(
        {"histogram": {0: 4, 1: 0, 2: 4, 3: 24}, "zerosAreShiftedSquare": True, "disjointSegments": True,
         "twosTranslateStandardSquares": True, "centreShifted": True, "intersections": 0}, "PAPER",
        "exactly 24 points Q with n(Q) = 3"), "fast", check_reflection_pair),
    Check("L3.1a", ("dim6-112cap",), _expected({"[45, 45, 22]": 56, "[40, 36, 36]": 308}, "PAPER",
                                               "are 56 and 308 respectively"), "medium", check_112_census),
    Check("L3.1b", ("dim6-112cap",), _expected({"directions": 308, "covered": 308}, "PAPER",
                                               "the (y1 - y2)-hyperplane direction of C is D"), "medium",
          check_112_differences),
    Check("L3.1c", ("dim6-112cap",), _expected(
        {**{str(matrix): count for matrix, count in zip(CODIM2_CLASS_MATRICES, (1540, 3696, 5775))}, "other": 0},
        "PAPER", "binom{56}{2} = 1540, 3696, and 5775"), "medium", check_112_codim2),
    Check("L3.1d", ("dim6-112cap",), _expected({"pairs": 1540, "caseOne": 1540, "equal": True}, "PAPER",
                                               "obtained from the unordered pairs"), "medium", check_112_pairs),
    Check("L3.2-design", ("dim5-45cap", "dim4-882A2"), _expected(
        {"size": 90, "census": {"[45, 45, 0]": 1, "[36, 36, 18]": 10, "[30, 30, 30]": 90, "[36, 27, 27]": 20},
         "emptyIsAxis": True, "matrices": 20, "flatFailures": 0}, "PAPER", "are respectively 1, 10, 90, and 20"),
          "medium", check_dual_design),
    Check("P3.6-cases", ("dim5-45cap", "dim4-882A2"), _expected(
        {"present": [_key(case) for case in PLACEMENT_CASES], "unexpected": 0, "wrongKind": 0},
        "PAPER", "exactly one of the following is true"), "medium", check_placement_cases),
    Check("P3.6-112cap", ("dim5-45cap", "dim4-882A2", "dim6-112cap"), _expected(
        {"found": True, "all112": True}, "PAPER", "we obtain a 112-cap 6-flat"), "medium", check_placement_112),
    Check("P3.6-96cap", ("dim5-45cap", "dim4-882A2", "dim6-96cap"), _expected(
        {"found": True, "classes": 1, "matchesAtlas": True, "direction454506": True}, "PAPER", "pairwise isomorphic"),
          "long", check_placement_96),
    Check("P-40cap", ("dim5-40cap", "dim4-882A2"), _expected({"directions": 10, "orbits": 1, "fibers882A2": True},
                                                              "PAPER", "act transitively on the set"), "medium",
          check_forty_cap),
    Check("P3.7-dir", ("dim5-delta686",), _expected({"directions": 3, "orbits": 1}, "PAPER",
                                                     "has a {20,16,6} hyperplane direction"), "fast",
          check_delta686_directions),
    Check("T1-delta686", ("dim5-delta686", "dim5-45cap"), _expected(
        {"census": {str(list(key)): value for key, value in builders.DELTA686_SPECTRUM.items()},
         "removals": comb(45, 3), "collisions": 0}, "PAPER", "Hyperplane point counts of a Delta686"), "medium",
          check_delta686_table),
    Check("P4.1a-opt1", ("dim6-112cap",), _expected({"placements": 486, "failures": 0}, "PAPER",
                                                    "A computer search verified that for each of those options"),
          "medium", check_option_one),
)}


def get_check(check_id):
    if check_id not in CHECKS:
        raise UnknownCheckException(f"Unknown check '{check_id}', expected one of {sorted(CHECKS)}.")
    return CHECKS[check_id]


def checks_up_to(max_runtime):
    """
    Checks at or below the runtime class, sorted by id.
    """
    if max_runtime not in RUNTIMES:
        raise UnknownCheckException(f"Unknown runtime class '{max_runtime}', expected one of {RUNTIMES}.")
    limit = RUNTIMES.index(max_runtime)
    return [CHECKS[check_id] for check_id in sorted(CHECKS) if RUNTIMES.index(CHECKS[check_id].runtime) <= limit]
