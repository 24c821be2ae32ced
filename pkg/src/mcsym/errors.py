"""Shared exception types.

Every error raised deliberately by this package derives from :class:`McsymError`,
so callers (and the CLI) can map failure classes to exit codes without having to
enumerate individual sites.
"""

from __future__ import annotations


class McsymError(Exception):
    """Base class for all errors raised by mcsym."""


class ParseError(McsymError):
    """Malformed textual input (logic programs, system files, cycle notation)."""

    def __init__(self, message: str, *, line: int | None = None) -> None:
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class BoundExceeded(McsymError):
    """A configured enumeration or size bound was exceeded."""


class InsufficientBeliefState(McsymError):
    """A belief state leaves a component undefined that an operation must read."""


class InternalError(McsymError):
    """An internal invariant failed; indicates a bug, not bad input."""
