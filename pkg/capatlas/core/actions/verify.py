"""
Module that runs registry checks and reports their verdicts.
"""

import json

from capatlas.verify.runner import run_all, run_check


def verify(check_id, run_everything, max_runtime, json_path, build, threads, log):
    """
    @param check_id: registry id or None
    @param run_everything: run every check up to max_runtime
    @param max_runtime: fast, medium or long
    @param json_path: file for the JSON summary or None
    @param build: build missing atlas entries
    @param threads: worker threads
    @param log:
    @return: exit state, 1 if any check failed
    """
    if run_everything:
        summary = run_all(max_runtime, build=build, threads=threads, log=log)
        reports = summary.reports
        document = summary.model_dump()
        log.log(42, f"{summary.passed} passed, {summary.failed} failed")
    else:
        report = run_check(check_id, build=build, threads=threads, log=log)
        reports = [report]
        document = report.model_dump()
    for report in reports:
        if not report.passed:
            log.log(42, f"{report.id} observed {json.dumps(report.observed, default=str)}")
    if json_path:
        with open(json_path, mode="w", encoding="UTF-8") as json_file:
            json.dump(document, json_file, indent=2, default=str)
        log.info("Verification summary written to %s.", json_path)
    return 0 if all(report.passed for report in reports) else 1
