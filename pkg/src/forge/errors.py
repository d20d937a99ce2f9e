"""Exception hierarchy shared by every forge module."""

from __future__ import annotations


class ForgeError(Exception):
    """Base class for all errors raised by forge."""


class ParameterError(ForgeError, ValueError):
    """An argument violates an operation's precondition."""


class InfeasibleParametersError(ParameterError):
    """A parameter bracket is empty.

    ``bracket`` names the violated constraint so callers can report it.
    """

    def __init__(self, bracket: str, message: str):
        super().__init__(f"{bracket}: {message}")
        self.bracket = bracket


class SizeError(ForgeError):
    """An enumeration or construction would exceed its configured cap."""

    def __init__(self, message: str, stage: str | None = None):
        if stage is not None:
            message = f"[{stage}] {message}"
        super().__init__(message)
        self.stage = stage


class GenerationError(ForgeError):
    """A rejection sampler ran out of tries."""


class FormatError(ForgeError, ValueError):
    """Malformed text in one of the on-disk formats."""


class StageError(ForgeError):
    """A pipeline stage failed; ``stage`` names it and ``__cause__`` holds the original error."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"stage {stage!r} failed: {message}")
        self.stage = stage
