"""
Runs registry checks against the atlas and wraps their verdicts into reports.
"""

import logging
import time
import traceback

from capatlas.atlas.cache import Atlas
from capatlas.models.exceptions import MissingDependencyException
from capatlas.models.reports import CheckReport, CheckSummary
from capatlas.models.return_threading import map_parallel
from capatlas.verify.context import CheckContext
from capatlas.verify.registry import checks_up_to, get_check

LOG = logging.getLogger("capatlas")


def _execute(check, context):
    """
    Runs one check; exceptions other than a missing dependency turn into a failed report.
    """
    start = time.time()
    try:
        passed, observed, witness = check.run(context)
    except MissingDependencyException:
        raise
    except Exception as exc:  # pylint: disable=broad-except
        context.log.debug(traceback.format_exc())
        context.log.error("Check %s raised %s: %s", check.id, type(exc).__name__, exc)
        passed, observed, witness = False, {"error": f"{type(exc).__name__}: {exc}"}, None
    seconds = round(time.time() - start, 3)
    context.log.log(42, "%s %s (%.1f s)", "PASS" if passed else "FAIL", check.id, seconds)
    return CheckReport(id=check.id, passed=bool(passed), observed=observed, expected=check.expected,
                       seconds=seconds, witness=witness)


def _resolve(checks, context):
    """
    Loads or builds every atlas entry the checks depend on, one after another.
    """
    for name in sorted({name for check in checks for name in check.dependencies}):
        context.cap(name)


def run_check(check_id, atlas=None, build=True, threads=1, log=LOG):
    """
    @param check_id: registry id
    @param atlas: Atlas, a default one if None
    @param build: build missing atlas entries
    @param threads: worker threads inside the check
    @param log:
    @return: CheckReport
    """
    check = get_check(check_id)
    context = CheckContext(atlas or Atlas(build=build, threads=threads, log=log), threads, log)
    _resolve([check], context)
    return _execute(check, context)


def run_all(max_runtime="medium", atlas=None, build=True, threads=1, log=LOG):
    """
    Runs every check up to the runtime class, several at once when threads > 1.
    @return: CheckSummary with reports sorted by id
    """
    checks = checks_up_to(max_runtime)
    context = CheckContext(atlas or Atlas(build=build, threads=threads, log=log), 1, log)
    _resolve(checks, context)
    log.info("Running %s checks up to runtime class %s.", len(checks), max_runtime)
    reports = map_parallel(lambda chunk: [_execute(check, context) for check in chunk], checks, threads)
    reports = sorted(reports, key=lambda report: report.id)
    passed = sum(report.passed for report in reports)
    return CheckSummary(maxRuntime=max_runtime, passed=passed, failed=len(reports) - passed, reports=reports)
