"""
Module that runs a placements job: enumerates placements of a base cap, records the middle level statistics of
each and writes the unions of the requested statistics classes.
"""

import os
import time

from capatlas.atlas.cache import ENTRIES, Atlas
from capatlas.core.utility import cap_file
from capatlas.core.utility.validate_schema import validate_placements_job
from capatlas.engine.placements import enumerate_placements, placement_statistics, placement_union
from capatlas.models.reports import PlacementRecord, PlacementReport
from capatlas.models.return_threading import map_parallel

REPORT_FILE = "placements_report.json"


def load_base(base, job_folder, threads, log):
    """
    @param base: atlas entry name or cap file path relative to the job file
    """
    if base in ENTRIES:
        return Atlas(threads=threads, log=log).get(base)
    return cap_file.read_cap(os.path.join(job_folder, os.path.expanduser(base)))


def placements(job, job_path, threads, log):
    """
    @param job: merged job (dict); 'pairs' lists the (n0, n2) classes whose unions are written as cap files
    @param job_path: path of the job file
    @param threads: worker threads (overrides the job)
    @param log:
    @return: exit state
    """
    job = validate_placements_job(job, log)
    threads = threads or job.get("threads", 1)
    job_folder = os.path.dirname(os.path.abspath(job_path))
    base = load_base(job["base"], job_folder, threads, log)
    start = time.time()
    found = enumerate_placements(base, job.get("mode", "fiber-aligned"), job.get("convention", "aut-left"),
                                 job.get("kind", "all"), threads, log)
    statistics = map_parallel(lambda chunk: [placement_statistics(placement) for placement in chunk], found, threads)
    census = {}
    for n0, n2 in statistics:
        census[f"({n0},{n2})"] = census.get(f"({n0},{n2})", 0) + 1
    records = [PlacementRecord(n0=n0, n2=n2, **placement.to_dict())
               for placement, (n0, n2) in zip(found, statistics)]
    output = os.path.join(job_folder, job.get("output", "placements_output"))
    os.makedirs(output, exist_ok=True)
    wanted = {tuple(pair) for pair in job.get("pairs", [])}
    for placement, pair in zip(found, statistics):
        if pair in wanted:
            cap_file.write_cap(os.path.join(output, f"union_{placement.index:05d}.cap"), placement_union(placement))
    report = PlacementReport(base=job["base"], mode=job.get("mode", "fiber-aligned"),
                             convention=job.get("convention", "aut-left"), count=len(found),
                             seconds=round(time.time() - start, 3), census=dict(sorted(census.items())),
                             placements=records)
    with open(os.path.join(output, REPORT_FILE), mode="w", encoding="UTF-8") as report_file:
        report_file.write(report.model_dump_json(indent=2))
    for key, value in sorted(census.items()):
        log.log(42, f"{key}: {value}")
    return 0
