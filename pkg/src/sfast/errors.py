"""Exception types shared across the package.

The CLI maps these onto exit codes, so every error raised by library code
should derive from SfastError.
"""


class SfastError(Exception):
    """Base class for all package errors."""


class MalformedTournament(SfastError):
    """Arc list is not a complete orientation: pair missing, duplicated,
    self-loop, or both orientations present."""


class NotAnArc(SfastError):
    """An arc reference does not exist in the tournament."""


class NotAFeedbackSet(SfastError):
    """Removing the given arcs still leaves a cycle through a terminal."""


class NotBackward(SfastError):
    """Arc is not backward with respect to the given order."""


class TerminalNotInSpan(SfastError):
    """Terminal does not lie inside the span of the backward arc."""


class OrderNotRegular(SfastError):
    """Operation requires a regular order but the order is not regular."""


class PreconditionViolated(SfastError):
    """A reduction rule was invoked on an instance that does not satisfy
    its stated precondition."""


class ProviderFailure(SfastError):
    """An order provider returned something that is not a permutation of
    the instance's vertices."""


class TooLarge(SfastError):
    """Instance exceeds the configured limit of an exhaustive method."""


class Infeasible(SfastError):
    """No arc set within the size cap is a feedback set."""

    def __init__(self, cap):
        super().__init__(f"no feedback arc set of size <= {cap}")
        self.cap = cap


class ParseError(SfastError):
    """Instance or witness file is malformed; carries a line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class BadParameters(SfastError):
    """Generator parameters are out of range or inconsistent."""
