"""
Module that prints canonical forms and decides isomorphism of two cap files.
"""

import json

from capatlas.core.utility import cap_file
from capatlas.engine.symmetry import are_isomorphic, canonical_form


def canon(first_path, second_path, log):
    """
    One cap: prints its canonical certificate. Two caps: prints a map between them or reports that there is none.
    @param first_path: cap file
    @param second_path: cap file or None
    @param log:
    @return: exit state, 1 if two caps are not isomorphic
    """
    first = cap_file.read_cap(first_path)
    if second_path is None:
        certificate = canonical_form(first, log)
        log.log(42, json.dumps(certificate.to_dict(), indent=2))
        log.log(42, cap_file.dumps(certificate.canonical).rstrip())
        return 0
    second = cap_file.read_cap(second_path)
    affine_map = are_isomorphic(first, second, log)
    if affine_map is None:
        log.log(42, "Not isomorphic.")
        return 1
    log.log(42, f"Isomorphic: {json.dumps(affine_map.to_dict())}")
    return 0
