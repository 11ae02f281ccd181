"""Exception types and process exit codes shared across the package."""

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class TropitestError(Exception):
    """Base class for errors raised deliberately by this package."""

    exit_code = EXIT_INTERNAL


class ParameterError(TropitestError):
    """An argument value is invalid (bad shape parameter, alpha out of range, ...)."""

    exit_code = EXIT_USAGE


class ConfigError(TropitestError):
    """A configuration is inconsistent (e.g. homology dim not below complex dim)."""

    exit_code = EXIT_USAGE


class RefusalError(TropitestError):
    """A brute-force reference implementation was asked to exceed its size bound."""

    exit_code = EXIT_USAGE


class InputError(TropitestError):
    """Input data is malformed (asymmetric matrix, ragged rows, missing file)."""

    exit_code = EXIT_DATA


class ParseError(InputError):
    """A file could not be parsed; the message names the file and position."""


class CapacityError(TropitestError):
    """A barcode carries more bars than the declared capacity allows."""

    exit_code = EXIT_DATA


class RegularizationError(TropitestError):
    """A bar violates the birth <= m * persistence regularization bound."""

    exit_code = EXIT_DATA


class DegenerateInputError(TropitestError):
    """Input is degenerate for the requested operation (e.g. no positive bars)."""

    exit_code = EXIT_DATA
