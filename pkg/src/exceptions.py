# Mapping errors to exit codes:
# 0. Success
# 1. Catch All for Errors
# 2. Invalid Dataset (unreadable or malformed input directory)
# 3. Invalid Destination (output path not writable)
# 6. Invalid Configuration / Parameter
# 7. Unknown Method
# 10. Invalid Schema (dimension mismatch, graph invariants)
# 22. Non-finite objective or gradient
# 23. Singular normal equations
# 24. Empty validation window

import logging
import traceback


def handle_exception(error: Exception, message: str, quiet: bool = False):
    logging.error(traceback.format_exc().strip().splitlines()[-1])
    logging.error(message)
    if not quiet:
        raise error


def exit_code_for(error: BaseException) -> int:
    return getattr(error, "_exit_code", 1)


class DynGraphError(Exception):
    """Base class for every error raised by this package."""

    _level = "error"
    _exit_code = 1

    def __init__(self, message="Unexpected error occurred."):
        super().__init__(message)


class InvalidDatasetError(DynGraphError):
    """Dataset directory missing, unreadable or malformed."""

    _level = "critical"
    _exit_code = 2

    def __init__(self, message="Invalid dataset error occurred."):
        super().__init__(message)


class OutputPathError(DynGraphError):
    _level = "critical"
    _exit_code = 3

    def __init__(self, message="Output path is not writable."):
        super().__init__(message)


class InvalidConfigError(DynGraphError):
    _level = "critical"
    _exit_code = 6

    def __init__(self, message="Invalid configuration."):
        super().__init__(message)


class InvalidParameterError(InvalidConfigError, ValueError):
    """A precondition on a numerical argument does not hold."""

    def __init__(self, message="Invalid parameter."):
        super().__init__(message)


class MethodNotFound(DynGraphError):
    _exit_code = 7

    def __init__(self, message="Method does not exist in the registry."):
        super().__init__(message)


class DimensionMismatchError(DynGraphError, ValueError):
    _exit_code = 10

    def __init__(self, message="Dimensions do not agree."):
        super().__init__(message)


class InvalidGraphError(DynGraphError, ValueError):
    """A snapshot breaks symmetry, nonnegativity or monotonicity."""

    _exit_code = 10

    def __init__(self, message="Invalid graph snapshot.", location=None):
        super().__init__(message)
        self.location = location


class NonFiniteError(DynGraphError, FloatingPointError):
    _level = "critical"
    _exit_code = 22

    def __init__(self, message="Non-finite value encountered.", iteration=None):
        super().__init__(message)
        self.iteration = iteration


class SingularSystemError(DynGraphError, ValueError):
    _exit_code = 23

    def __init__(self, message="Normal equations are singular."):
        super().__init__(message)


class EmptyWindowError(DynGraphError, ValueError):
    _exit_code = 24

    def __init__(self, message="No usable validation window."):
        super().__init__(message)
