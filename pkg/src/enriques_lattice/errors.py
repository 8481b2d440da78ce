"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class EnriquesError(Exception):
    """Base class for all errors raised by this package."""


class StructuralError(EnriquesError, ValueError):
    """Malformed input: non-square or asymmetric matrices, bad shapes."""


class DomainError(EnriquesError, ValueError):
    """Input is well formed but outside the operation's domain."""


class InconsistencyError(EnriquesError):
    """An exact computation contradicts a claimed relation."""


class NoOverlatticeError(EnriquesError):
    """No even unimodular overlattice exists."""


class AmbiguityError(EnriquesError):
    """Several overlattices qualify; ``candidates`` lists them all."""

    def __init__(self, message: str, candidates=()):
        super().__init__(message)
        self.candidates = list(candidates)


class ParseError(EnriquesError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class LookupFailure(EnriquesError, KeyError):
    """Unknown catalog entry."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class ClassificationError(EnriquesError):
    """A subdiagram is not of the expected (definite or affine) kind.

    ``witness`` holds a rational vector with non-negative square in the
    span of the subdiagram, when one was found.
    """

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class BoundViolation(EnriquesError):
    """More curves in ``s`` fibers than the Shioda-Tate bound allows."""


class UnsupportedError(EnriquesError):
    pass


class ValidationError(EnriquesError, ValueError):
    def __init__(self, message: str, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class ReductionDivergence(EnriquesError, RuntimeError):
    """The reflection loop exceeded its step budget."""


class CompletenessRefused(DomainError):
    """The finite-index test failed; ``evidence`` says where."""

    def __init__(self, message: str, evidence=None):
        super().__init__(message)
        self.evidence = evidence
