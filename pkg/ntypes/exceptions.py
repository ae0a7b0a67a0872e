"""Exceptions for the ntypes kernel."""

from __future__ import annotations

from typing import Any


class NTypesError(Exception):
    """Base exception for ntypes errors."""


class MalformedSpec(NTypesError):
    """Input description is structurally invalid."""


class SimplicialIdentityViolation(NTypesError):
    """Face data breaks a simplicial identity."""

    def __init__(self, message: str, pair: tuple[int, int], simplex: str) -> None:
        """Initialize simplicial identity error.

        Args:
            message: Error message.
            pair: The failing index pair (i, j) with i < j.
            simplex: Name of the offending nondegenerate simplex.
        """
        super().__init__(message)
        self.pair = pair
        self.simplex = simplex


class NonSimplicialMap(NTypesError):
    """A cell assignment does not commute with the face maps."""

    def __init__(self, message: str, cell: str) -> None:
        """Initialize non-simplicial map error.

        Args:
            message: Error message.
            cell: Source cell where compatibility fails.
        """
        super().__init__(message)
        self.cell = cell


class NonInjectiveGlue(NTypesError):
    """Neither leg of a pushout is a monomorphism."""


class DimBudgetExceeded(NTypesError):
    """Requested dimension is above the configured bound."""

    def __init__(self, message: str, requested: int, bound: int) -> None:
        """Initialize dimension budget error.

        Args:
            message: Error message.
            requested: Requested dimension.
            bound: Configured dimension bound.
        """
        super().__init__(message)
        self.requested = requested
        self.bound = bound


class SearchBudgetExceeded(NTypesError):
    """Backtracking search ran out of nodes."""

    def __init__(self, message: str, nodes: int) -> None:
        """Initialize search budget error.

        Args:
            message: Error message.
            nodes: Number of search nodes visited.
        """
        super().__init__(message)
        self.nodes = nodes


class NotFibrant(NTypesError):
    """An operation needing a Kan complex got a refuted or undecided input."""

    def __init__(self, message: str, witness: dict[str, Any] | None = None) -> None:
        """Initialize fibrancy error.

        Args:
            message: Error message.
            witness: Refuting horn, if one was found.
        """
        super().__init__(message)
        self.witness = witness


class PreconditionFailed(NTypesError):
    """A documented precondition does not hold."""


class VertexNotFound(NTypesError):
    """Named vertex does not exist."""


class EnumerationImpossible(NTypesError):
    """An infinite level would have to be enumerated."""


class UnknownObject(NTypesError):
    """Named object is not part of the site or groupoid."""


class SectionError(NTypesError):
    """A sectionwise computation failed at one object."""

    def __init__(self, message: str, section: str) -> None:
        """Initialize section error.

        Args:
            message: Error message.
            section: Site object whose section failed.
        """
        super().__init__(message)
        self.section = section
