"""Exception types shared across the library."""


class GalabError(Exception):
    """Base class for all library errors."""


class StencilError(GalabError):
    """Grid too small for the finite-difference stencil."""


class ShapeError(GalabError):
    """Fields defined on incompatible grids."""


class ExactnessError(GalabError):
    """The integrated 1-form is not closed within tolerance.

    Signals that the supplied pair is not a solution/conjugate-solution
    pair, so the potential is path dependent.
    """


class ZeroPotentialError(GalabError):
    """A pair potential vanishes where a transform needs to divide by it."""


class SingularOmegaError(GalabError):
    """The seed potential matrix is singular at one or more grid nodes."""


class DegenerateChartError(GalabError):
    """Chart derivative vanishes on the strip."""


class BranchError(GalabError):
    """No continuous square-root branch can be tracked on the strip."""


class NormalizationError(GalabError):
    """Pole profile is not in (or cannot be put in) normalized form."""


class MeromorphicViolation(GalabError):
    """Leading coefficients violate the local solvability conditions."""


class PositivityError(GalabError):
    """A leading coefficient required to be strictly positive is not."""


class FitError(GalabError):
    """Not enough samples for the Laurent coefficient fit."""


class ExpressionError(GalabError):
    """Problem parsing or evaluating an expression string."""

    def __init__(self, message, line=1, column=0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class ScenarioError(GalabError):
    """Scenario configuration is invalid or incomplete."""
