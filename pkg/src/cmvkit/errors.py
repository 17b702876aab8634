"""Exception hierarchy shared by every cmvkit module."""


class CMVError(Exception):
    """Base class for all errors raised by cmvkit."""


class ArgumentError(CMVError, ValueError):
    """Input violates a documented precondition."""


class NumericError(CMVError, ArithmeticError):
    """A numerical stage failed (non-convergence, escaping roots, ...).

    ``partial`` carries whatever intermediate result was available.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class SingularMatrixError(NumericError):
    """Pivot below threshold in a linear solve."""


class ConsistencyError(CMVError):
    """Two independent routes to the same quantity disagree."""


class StructureError(CMVError):
    """A matrix does not have the structure it claims (rank-one defects, CMV layout)."""


class TerminalParameterReached(CMVError):
    """The Schur algorithm hit a unimodular value: ``gamma`` is the terminal parameter."""

    def __init__(self, gamma):
        super().__init__(f"|f(0)| = {abs(gamma):.17g} is not a strict Schur point")
        self.gamma = gamma


class ExistenceNotFound(NumericError):
    """A solver guaranteed to have a solution in theory did not find one numerically."""


class NoSolution(CMVError):
    """Mixed inverse problem has no solution; ``report`` holds the obstruction."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = dict(report or {})


class CapabilityError(CMVError):
    """Requested case lies outside what the solvers support."""
