"""Exception types shared across the package."""

from __future__ import annotations


class OntolabError(Exception):
    """Base class for all package-specific failures."""


class DimensionError(OntolabError):
    """State or operator has a dimension the operation cannot accept."""


class FormatError(OntolabError):
    """A JSON document violates the model or table schema.

    Collects every violation found, not just the first one.
    """

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class OrthogonalPairError(OntolabError):
    """Degree of epistemicity requested for an (almost) orthogonal pair."""


class UndecidableError(OntolabError):
    """A structural predicate has no evidence either way in this model."""


class OrderingError(OntolabError):
    """Measurement sequence conflicts with the table's temporal order."""


class InfeasibleError(OntolabError):
    """LP constraint set admits no solution."""

    def __init__(self, message: str, constraint: str | None = None):
        self.constraint = constraint
        super().__init__(message if constraint is None else f"{message} [{constraint}]")


class UnboundedError(OntolabError):
    """LP objective is unbounded over the feasible region."""


class TooLargeError(OntolabError):
    """Exhaustive enumeration would exceed the configured work cap."""


class ConsistencyError(OntolabError):
    """Two independent routes to the same quantity disagree.

    Raised instead of silently returning either value; a triggered instance
    means an upstream invariant is broken.
    """
