"""Exception hierarchy shared by every module.

The CLI maps any ``QexpError`` to exit code 1.
"""


class QexpError(ValueError):
    """Base class for domain errors raised by qexp."""


class InvalidBase(QexpError):
    pass


class NonFinite(QexpError):
    pass


class OutOfDomain(QexpError):
    pass


class DomainMismatch(QexpError):
    pass


class ZeroIntegral(QexpError):
    pass


class NoSolution(QexpError):
    pass


class NotFound(QexpError):
    pass


class NotStrict(QexpError):
    pass


class BreakpointOverflow(QexpError):
    pass


class BranchOverflow(QexpError):
    pass


class ConsistencyError(QexpError):
    """An internal identity check (e.g. theta_n == G^n(x)) failed."""
