"""Exceptions raised by locuslab"""

from typing import Any, Optional


class LocusLabError(Exception):
    """Base class for locuslab failures"""


class TowerMismatchError(LocusLabError):
    """Scalars live in towers that neither contains the other"""


class RepresentabilityError(LocusLabError):
    """A value does not fit in a multi-quadratic tower over Q(i)"""


class ScalarParseError(LocusLabError, ValueError):
    """Malformed scalar or polynomial literal"""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class ConfigurationError(LocusLabError, ValueError):
    """Invalid configuration or generator parameters"""


class DegenerateFormError(LocusLabError, ValueError):
    """Isotropic form, or a denominator vanishing identically on a hyperplane"""


class DegenerateSystemError(LocusLabError):
    """A linear system expected to be non-degenerate is singular"""


class MonodromyError(LocusLabError):
    """Leading Laurent coefficient is not of the form m(m+1)(a,a)"""


class RootClusteringError(LocusLabError):
    """Root multiplicities could not be resolved at the working precision"""


class NonTerminating(LocusLabError):
    """Berest iteration did not terminate after M steps"""

    def __init__(self, message: str, phi: Any = None, steps: int = 0):
        super().__init__(message)
        self.phi = phi
        self.steps = steps
