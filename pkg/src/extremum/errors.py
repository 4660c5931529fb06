"""Exception hierarchy shared by the library and the command line tool."""


class ExtremumError(Exception):
    """Base class for all errors raised by :mod:`extremum`."""


class PreconditionError(ExtremumError, ValueError):
    """An input violates a mathematical precondition of the requested operation."""


class DataError(ExtremumError, ValueError):
    """Input data could not be read, parsed or interpreted."""
