"""Exception types shared across the package."""

from __future__ import annotations


class FvstError(Exception):
    """Base class for all package errors."""


class ValidationError(FvstError, ValueError):
    """Malformed input: bad arc list, bad instance text, bad report."""


class PreconditionError(FvstError):
    """An algorithm was called on an input outside its contract.

    ``witness`` carries the offending structure (a 5-set, a heavy triangle, ...)
    so callers can report it.
    """

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class InvariantError(FvstError):
    """A runtime check that the theory guarantees has failed.

    ``bundle`` holds whatever is needed to reproduce the failure.
    """

    def __init__(self, message: str, bundle: dict | None = None):
        super().__init__(message)
        self.bundle = bundle or {}


class SolverError(FvstError):
    """The LP solver did not return an optimal solution."""


class SizeLimitError(FvstError, ValueError):
    """Instance exceeds the cap of an exponential-time routine."""
