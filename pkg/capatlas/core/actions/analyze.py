"""
Module that prints the direction spectrum of a cap file and, for 18-caps of dimension 4 and 45-caps of dimension 5,
their named features.
"""

import json

from capatlas.atlas import builders
from capatlas.atlas import features as atlas_features
from capatlas.core.utility import cap_file
from capatlas.engine.directions import moment_identities, spectrum


def analyze(cap_path, codim, with_features, threads, log):
    """
    @param cap_path: cap file
    @param codim: codimension of the spectrum
    @param with_features: also print the feature report
    @param threads: worker threads
    @param log:
    @return: exit state
    """
    cap = cap_file.read_cap(cap_path)
    log.log(42, f"{cap.size}-cap of dimension {cap.dimension}, valid: {cap.is_valid()}")
    report = spectrum(cap, codim, threads, log)
    for line in report.lines():
        log.log(42, line)
    if codim == 1:
        ok, diagnostic = moment_identities(report, cap.size, cap.dimension)
        log.log(42, f"Moment identities: {'ok' if ok else diagnostic}")
    if with_features:
        feature_report = _features(cap, log)
        if feature_report is None:
            log.warning("Features are defined for 18-caps of dimension 4 and 45-caps of dimension 5 only.")
            return 1
        log.log(42, json.dumps(feature_report.model_dump(exclude_none=True), indent=2))
    return 0


def _features(cap, log):
    match (cap.dimension, cap.size):
        case (4, 18):
            return atlas_features.analyze_882A2(cap, log).to_report()
        case (5, 45):
            return atlas_features.analyze_45cap(cap, builders.reference_882A2(cap, log), log).to_report()
    return None
