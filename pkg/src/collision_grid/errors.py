"""Exception types shared across the package."""

from __future__ import annotations


class InvalidArgument(ValueError):
    """An argument violates an operation's precondition."""


class UnsupportedSize(ValueError):
    """The input exceeds a size cap (isomorphism matcher, dense simulator)."""


class EngineInvariantError(RuntimeError):
    """The stream engine reached a state its kinematics should forbid."""


class NoSteadyState(ValueError):
    """No steady-state window exists in which the target topology appears."""


class ParseError(ValueError):
    """Malformed pattern document. ``line`` is 1-based, or None if global."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
