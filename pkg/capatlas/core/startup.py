"""
Contains main method. Interprets command line, sets logging and starts corresponding action.
"""
import logging
import math
import os
import sys
import time
import traceback

import click

from capatlas.atlas.cache import ENTRIES
from capatlas.core.actions import analyze, build, canon, placements, run_search, verify, version
from capatlas.core.utility.handler import configuration_handler
from capatlas.core.utility.paths.basic_path import CONFIG_FOLDER, DEFAULT_CONFIG_PATH, ENFORCED_CONFIG_PATH
from capatlas.verify.registry import CHECKS, RUNTIMES

FOLDER_START = ("~/", "/", "./")

VERBOSITY_LIST = [logging.WARNING, logging.INFO, logging.DEBUG]
LOGGER_FORMAT = "%(asctime)s [%(levelname)s] %(message)s"
LOG = logging.getLogger("capatlas")
logging.addLevelName(42, "PRINT")


def set_logger_verbosity(verbosity):
    """
    Sets verbosity, format and handler.
    @param verbosity: level of verbosity
    @return:
    """
    capped_verbosity = min(verbosity, len(VERBOSITY_LIST) - 1)
    LOG.setLevel(VERBOSITY_LIST[capped_verbosity])
    LOG.debug(f"Logging verbosity set to {capped_verbosity}")


def expand_path(path):
    if path.startswith(FOLDER_START):
        return os.path.expanduser(path)
    found = configuration_handler.find_file_in_folders(path, ["", CONFIG_FOLDER], LOG)
    return found or os.path.join(CONFIG_FOLDER, path)


def load_job(job_path):
    """
    Reads a job file and merges it with the default and enforced job configurations.
    """
    job = configuration_handler.read_configuration(LOG, job_path)
    return configuration_handler.merge_configurations(user_config=job, default_config_path=DEFAULT_CONFIG_PATH,
                                                      enforced_config_path=ENFORCED_CONFIG_PATH, log=LOG)


def run_action(action, options):
    """
    Executes passed action.
    :param action: action to execute
    :param options: command line options of the action and the global ones (dict)
    :return: exit state
    """
    start_time = time.time()
    exit_state = 0
    threads = options.get("threads", 1)

    try:
        match action:
            case 'build':
                LOG.info("Action atlas build selected")
                exit_state = build.build(options.get("only"), threads, LOG)
            case 'analyze':
                LOG.info("Action analyze selected")
                exit_state = analyze.analyze(options["cap"], options.get("codim", 1), options.get("features", False),
                                             threads, LOG)
            case 'canon':
                LOG.info("Action canon selected")
                exit_state = canon.canon(options["first"], options.get("second"), LOG)
            case 'search':
                LOG.info("Action search selected")
                exit_state = run_search.search(load_job(options["job"]), options["job"], options.get("threads"),
                                               options.get("checkpoint"), LOG)
            case 'placements':
                LOG.info("Action placements selected")
                exit_state = placements.placements(load_job(options["job"]), options["job"], options.get("threads"),
                                                   LOG)
            case 'verify':
                LOG.info("Action verify selected")
                exit_state = verify.verify(options.get("check_id"), options.get("run_all", False),
                                           options.get("max_runtime", "medium"), options.get("json_path"),
                                           not options.get("no_build", False), threads, LOG)
            case _:
                LOG.error("Unknown action %s.", action)
                exit_state = 2

    except Exception as _:  # pylint: disable=broad-exception-caught
        exc_type, exc_value, exc_traceback = sys.exc_info()
        LOG.error("".join(traceback.format_exception(exc_type, exc_value, exc_traceback)))
        exit_state = 2

    time_in_s = time.time() - start_time
    LOG.log(42, f"--- {math.floor(time_in_s / 60)} minutes and {round(time_in_s % 60, 2)} seconds ---")
    return exit_state


# pylint: disable=no-value-for-parameter,too-many-positional-arguments,too-many-arguments
@click.group(context_settings={"help_option_names": ['-h', '--help']})
@click.version_option(version.__version__, "-V", "--version", prog_name=version.PROG_NAME, message=version.MESSAGE)
@click.option("-v", "--verbose", count=True, help="Increases logging verbosity.")
@click.option("-t", "--threads", type=click.IntRange(min=1), default=1, help="Worker threads.")
@click.option("-c", "--checkpoint", type=click.Path(), help="Checkpoint folder of resumable searches.")
@click.pass_context
def main(context, verbose, threads, checkpoint):
    """Reconstructs and verifies caps in F_3^n."""
    logging.basicConfig(format=LOGGER_FORMAT)
    LOG.addHandler(logging.FileHandler("capatlas.log"))
    set_logger_verbosity(verbose)
    context.obj = {"threads": threads, "checkpoint": checkpoint}


@main.group()
def atlas():
    """Manages the atlas cache."""


@atlas.command("build")
@click.option("--only", type=click.Choice(sorted(ENTRIES)), help="Build one entry with its dependencies.")
@click.pass_obj
def atlas_build(options, only):
    """Builds missing atlas entries."""
    sys.exit(run_action("build", {**options, "only": only}))


@main.command("analyze")
@click.argument("cap", type=click.Path(exists=True, dir_okay=False))
@click.option("--codim", type=click.IntRange(min=1), default=1, help="Codimension of the spectrum.")
@click.option("--features", is_flag=True, help="Prints the feature report of 882A2 and 45-caps.")
@click.pass_obj
def analyze_command(options, cap, codim, features):
    """Prints the point count spectrum of a cap file."""
    sys.exit(run_action("analyze", {**options, "cap": cap, "codim": codim, "features": features}))


@main.command("canon")
@click.argument("first", type=click.Path(exists=True, dir_okay=False))
@click.argument("second", type=click.Path(exists=True, dir_okay=False), required=False)
@click.pass_obj
def canon_command(options, first, second):
    """Canonical form of a cap file, or an isomorphism between two."""
    sys.exit(run_action("canon", {**options, "first": first, "second": second}))


@main.command("search")
@click.argument("job", type=click.Path())
@click.pass_obj
def search_command(options, job):
    """Runs a search job (YAML or JSON)."""
    sys.exit(run_action("search", {**options, "job": expand_path(job)}))


@main.command("placements")
@click.argument("job", type=click.Path())
@click.pass_obj
def placements_command(options, job):
    """Runs a placements job (YAML or JSON)."""
    sys.exit(run_action("placements", {**options, "job": expand_path(job)}))


@main.command("verify")
@click.option("--id", "check_id", type=click.Choice(sorted(CHECKS)), help="Runs one check.")
@click.option("--all", "run_all", is_flag=True, help="Runs every check up to --max-runtime.")
@click.option("--max-runtime", type=click.Choice(RUNTIMES), default="medium", help="Slowest runtime class to run.")
@click.option("--json", "json_path", type=click.Path(dir_okay=False), help="Writes the reports as JSON.")
@click.option("--no-build", is_flag=True, help="Fails instead of building missing atlas entries.")
@click.pass_obj
def verify_command(options, check_id, run_all, max_runtime, json_path, no_build):
    """Re-runs the computer-checked claims."""
    if bool(check_id) == run_all:
        raise click.UsageError("Exactly one of --id and --all is required.")
    sys.exit(run_action("verify", {**options, "check_id": check_id, "run_all": run_all, "max_runtime": max_runtime,
                                   "json_path": json_path, "no_build": no_build}))


if __name__ == '__main__':
    main()
