"""Exception types raised by gdncolor."""

from __future__ import annotations

from typing import Optional, TYPE_CHECKING

if TYPE_CHECKING:
    from .graph import ColorAssignment


class GdnColorError(Exception):
    """Base class for errors raised by this package."""


class DimacsParseError(GdnColorError, ValueError):
    """Raised when a DIMACS or edge-list file cannot be parsed."""

    def __init__(self, message: str, line_number: Optional[int] = None) -> None:
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class InvariantError(GdnColorError, RuntimeError):
    """Raised when an internal consistency check fails."""


class GenerationError(GdnColorError, RuntimeError):
    """Raised when a random graph generator runs out of retries."""

    def __init__(self, message: str, *, seed: int, attempts: int) -> None:
        self.seed = seed
        self.attempts = attempts
        super().__init__(f"{message} (seed={seed}, attempts={attempts})")


class BudgetExceededError(GdnColorError):
    """Raised when an exact search stops at its node-expansion budget.

    Attributes
    ----------
    lower:
        Best proven lower bound on the chromatic number.
    upper:
        Best known upper bound (colours used by ``witness``).
    witness:
        Proper colouring achieving ``upper``, when one is known.
    expansions:
        Search nodes expanded before giving up.
    """

    def __init__(
        self,
        message: str,
        *,
        lower: int,
        upper: int,
        witness: Optional["ColorAssignment"] = None,
        expansions: int = 0,
    ) -> None:
        self.lower = lower
        self.upper = upper
        self.witness = witness
        self.expansions = expansions
        super().__init__(f"{message} (bounds: {lower} <= chi <= {upper})")
