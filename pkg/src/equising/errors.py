"""Exception hierarchy shared by every engine module.

The CLI maps the four intermediate classes onto exit codes, so new errors
should subclass one of them rather than :class:`EquisingError` directly.
"""

from __future__ import annotations


class EquisingError(Exception):
    """Base class for all package errors."""


class UsageError(EquisingError):
    """Malformed input (exit code 1)."""


class ResourceCapError(EquisingError):
    """A configured resource cap was hit (exit code 2)."""


class PreconditionError(EquisingError):
    """An operation was called outside its domain (exit code 3)."""


class VerificationError(EquisingError):
    """A certificate or invariant failed to re-verify (exit code 4)."""

    def __init__(self, message: str, report: object | None = None) -> None:
        super().__init__(message)
        self.report = report


class ParseError(UsageError, ValueError):
    def __init__(self, message: str, text: str, position: int) -> None:
        super().__init__(f"{message} at position {position}: {text!r}")
        self.text = text
        self.position = position


class NonPositiveWeight(UsageError, ValueError):
    pass


class FieldTooLarge(ResourceCapError):
    pass


class PrecisionCap(ResourceCapError):
    pass


class BoxTooLarge(ResourceCapError):
    pass


class DenominatorCap(ResourceCapError):
    pass


class NotApproximableInput(PreconditionError):
    pass


class EpsilonTooLarge(PreconditionError):
    pass


class PreconditionMemberExponent(PreconditionError):
    pass


class NonIntegrableTerm(PreconditionError):
    pass


class DegenerateRegion(PreconditionError):
    pass


class CertificateMismatch(VerificationError):
    pass


class MonotonicityViolation(VerificationError):
    pass
