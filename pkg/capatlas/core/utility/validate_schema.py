"""
Handles the schema validation for capatlas' job files (search and placement jobs).
"""

from schema import And, Optional, Or, Schema, SchemaError, Use

from capatlas.models.exceptions import ConfigurationException

MAX_DIMENSION = 8
MODES = ("fiber-aligned", "shift")
CONVENTIONS = ("aut-left",)
KINDS = ("all", "translation", "reflection", "aligned")


def fiber_label(text):
    """
    Parses a fiber label like "-1,0" or "2, 0" into a tuple of values in {0, 1, 2}.
    """
    try:
        values = tuple(int(value) % 3 for value in str(text).split(","))
    except ValueError as exc:
        raise SchemaError(f"Fiber label '{text}' must be comma separated integers") from exc
    return values


def fiber_targets(targets):
    """
    fiberTargets is a list of sizes in label order or a mapping from fiber label to size.
    """
    if isinstance(targets, list):
        if not all(isinstance(size, int) and size >= 0 for size in targets):
            raise SchemaError("'fiberTargets' list entries must be non-negative integers")
        return targets
    if isinstance(targets, dict):
        parsed = {}
        for label, size in targets.items():
            if not isinstance(size, int) or size < 0:
                raise SchemaError(f"'fiberTargets' entry {label} must be a non-negative integer")
            parsed[fiber_label(label)] = size
        return parsed
    raise SchemaError("'fiberTargets' must be a list or a mapping")


DIMENSION = And(int, lambda n: 1 <= n <= MAX_DIMENSION, error=f"'dimension' must be in 1..{MAX_DIMENSION}")
ROW = [And(int, Use(lambda value: value % 3))]

FIBRATION = {'functionals': And([ROW], len, error="'functionals' must be a non-empty list of rows"),
             Optional('constants'): ROW}

COMMON = {Optional('output'): str,
          Optional('threads'): And(int, lambda threads: threads >= 1, error="'threads' must be positive"),
          Optional('checkpoint'): Or(str, None),
          Optional('deterministic'): And(bool, lambda value: value, error="only deterministic runs are supported"),
          Optional('isomorphFree'): bool,
          Optional('limit'): And(int, lambda limit: limit >= 0),
          Optional('mode'): Or(*MODES),
          Optional('convention'): Or(*CONVENTIONS),
          Optional('kind'): Or(*KINDS)}

search_schema = Schema(
    {'dimension': DIMENSION,
     'target': And(int, lambda target: target >= 0, error="'target' must be non-negative"),
     Optional('seed'): Or(str, [int], None),
     Optional('fibration'): FIBRATION,
     Optional('fiberTargets'): Use(fiber_targets),
     **COMMON})

placements_schema = Schema(
    {'base': str,
     Optional('pairs'): [And([int], lambda pair: len(pair) == 2)],
     **COMMON})


def validate_search_job(job, log):
    """
    Validates and normalises a merged search job.
    @param job: dict
    @param log:
    @return: validated job
    """
    return _validate(search_schema, job, log, "search")


def validate_placements_job(job, log):
    return _validate(placements_schema, job, log, "placements")


def _validate(schema, job, log, kind):
    log.info("Validating %s job schema...", kind)
    try:
        validated = schema.validate(job)
    except SchemaError as err:
        log.warning(f"{kind.capitalize()} job invalid. See error: {err}.")
        raise ConfigurationException(f"{kind.capitalize()} job invalid: {err}") from err
    fibration = validated.get("fibration")
    if fibration:
        dimension = validated["dimension"]
        if any(len(row) != dimension for row in fibration["functionals"]):
            raise ConfigurationException(f"Functionals must have {dimension} entries.")
        targets = validated.get("fiberTargets")
        if isinstance(targets, list) and len(targets) != 3 ** len(fibration["functionals"]):
            raise ConfigurationException(f"'fiberTargets' needs {3 ** len(fibration['functionals'])} entries.")
    elif validated.get("fiberTargets") is not None:
        raise ConfigurationException("'fiberTargets' requires a 'fibration'.")
    log.debug("%s job schema valid.", kind.capitalize())
    return validated
