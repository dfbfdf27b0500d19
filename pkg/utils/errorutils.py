import time
import logging

logger = logging.getLogger(__name__)


class MuubError(Exception):
    """Base class for every error raised by the toolkit.

    Each subclass carries the process exit code the command line maps it to.
    """
    exit_code = 1


class InvalidDimension(MuubError, ValueError):
    exit_code = 2

    def __init__(self, d, requirement="an odd prime"):
        super().__init__(f"dimension {d!r} is not {requirement}")
        self.d = d


class IndexOutOfRange(MuubError, IndexError):
    exit_code = 2

    def __init__(self, name, value, low, high):
        super().__init__(f"{name}={value!r} outside [{low}, {high}]")
        self.name = name
        self.value = value


class DimensionMismatch(MuubError, ValueError):
    exit_code = 2


class NotRepresentable(MuubError, ArithmeticError):
    """The result leaves Q(zeta_d) scaled by powers of 1/sqrt(d)."""
    exit_code = 2


class NotUnitaryFamily(MuubError, ValueError):
    exit_code = 2


class NotUnitary(MuubError, ValueError):
    exit_code = 2


class SameBasis(MuubError, ValueError):
    exit_code = 2


class MissingParameter(MuubError, ValueError):
    exit_code = 2


class DegenerateFamily(MuubError, ValueError):
    exit_code = 3


class VerificationFailed(MuubError):
    exit_code = 4


class OutputError(MuubError, OSError):
    exit_code = 5


def check_index(name, value, low, high):
    if not isinstance(value, int) or isinstance(value, bool) or not low <= value <= high:
        raise IndexOutOfRange(name, value, low, high)
    return value


def repeat_until_finish(func, max_retries=3, delay=0.1, exceptions=(OSError,)):
    """Calls `func` until it succeeds, retrying on the given exceptions.

    Args:
        func: Zero-argument callable.
        max_retries: Attempts before giving up.
        delay: Seconds to sleep between attempts.
        exceptions: Exception types that trigger a retry.

    Returns:
        Whatever `func` returns.

    Raises:
        OutputError: If every attempt failed.
    """
    last_error = None
    for attempt in range(1, max_retries + 1):
        try:
            return func()
        except exceptions as e:
            last_error = e
            logger.warning("attempt %d/%d failed: %s", attempt, max_retries, e)
            time.sleep(delay)
    raise OutputError(f"giving up after {max_retries} attempts: {last_error}") from last_error
