"""
Module that runs a search job: extends a seed cap to caps of the target size, optionally fiber by fiber.
"""

import os
import time

from capatlas.core.utility import cap_file
from capatlas.core.utility.validate_schema import validate_search_job
from capatlas.engine.geometry import CapSet, Fibration
from capatlas.engine.search import extend_dfs
from capatlas.models.exceptions import DimensionMismatchException
from capatlas.models.reports import SearchReport

REPORT_FILE = "search_report.json"


def load_seed(seed, dimension, job_folder):
    """
    @param seed: cap file path (relative to the job file), list of point indices or None
    @param dimension: n
    @param job_folder: folder of the job file
    @return: CapSet
    """
    if seed is None:
        return CapSet.empty(dimension)
    if isinstance(seed, list):
        return CapSet.from_points(dimension, seed)
    cap = cap_file.read_cap(os.path.join(job_folder, os.path.expanduser(seed)))
    if cap.dimension != dimension:
        raise DimensionMismatchException(f"Seed {seed} has dimension {cap.dimension}, job has {dimension}.")
    return cap


def search(job, job_path, threads, checkpoint, log):
    """
    Runs a merged search job and writes every result plus a SearchReport to the output folder.
    @param job: merged job (dict)
    @param job_path: path of the job file
    @param threads: worker threads (overrides the job)
    @param checkpoint: checkpoint folder (overrides the job)
    @param log:
    @return: exit state, 1 if nothing was found
    """
    job = validate_search_job(job, log)
    dimension = job["dimension"]
    job_folder = os.path.dirname(os.path.abspath(job_path))
    seed = load_seed(job.get("seed"), dimension, job_folder)
    fibration = None
    if job.get("fibration"):
        fibration = Fibration(job["fibration"]["functionals"], job["fibration"].get("constants", ()))
    start = time.time()
    results, nodes = extend_dfs(seed, job["target"], fibration, job.get("fiberTargets"),
                                isomorph_free=job.get("isomorphFree", False), limit=job.get("limit", 0),
                                checkpoint=checkpoint or job.get("checkpoint"),
                                threads=threads or job.get("threads", 1), log=log)
    output = os.path.join(job_folder, job.get("output", "search_output"))
    os.makedirs(output, exist_ok=True)
    names = []
    for number, cap in enumerate(results):
        name = f"result_{number:04d}.cap"
        cap_file.write_cap(os.path.join(output, name), cap)
        names.append(name)
    report = SearchReport(dimension=dimension, target=job["target"], nodes=nodes,
                          seconds=round(time.time() - start, 3), results=names,
                          isomorphFree=job.get("isomorphFree", False))
    with open(os.path.join(output, REPORT_FILE), mode="w", encoding="UTF-8") as report_file:
        report_file.write(report.model_dump_json(indent=2))
    log.log(42, f"{len(results)} caps of size {job['target']} found ({nodes} nodes), written to {output}")
    return 0 if results else 1
