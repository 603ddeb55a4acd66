""" module for additional exceptions """


class CapAtlasException(Exception):
    """ Base exception of capatlas. """


class DimensionMismatchException(CapAtlasException):
    """ Points, caps or maps of different dimensions were combined. """


class GeometryException(CapAtlasException):
    """ Degenerate geometric input (equal points on a line, singular map, dependent functionals, ...). """


class NotSpanningException(GeometryException):
    """ Cap does not span its ambient space affinely. """

    def __init__(self, hull_dimension, dimension):
        super().__init__(f"Cap spans an affine hull of dimension {hull_dimension}, ambient dimension is "
                         f"{dimension}.")
        self.hull_dimension = hull_dimension
        self.dimension = dimension


class CapFileException(CapAtlasException):
    """ Malformed cap file. """

    def __init__(self, message, line_number=None):
        prefix = f"line {line_number}: " if line_number is not None else ""
        super().__init__(f"{prefix}{message}")
        self.line_number = line_number


class ConfigurationException(CapAtlasException):
    """ Configuration exception"""


class SearchFailureException(CapAtlasException):
    """ A builder could not reproduce a structure that has to exist. """


class CacheCorruptionException(CapAtlasException):
    """ Atlas cache content does not match its manifest. """


class UnknownCheckException(CapAtlasException):
    """ Check id is not in the registry. """


class MissingDependencyException(CapAtlasException):
    """ Atlas entry missing while building is disabled. """
