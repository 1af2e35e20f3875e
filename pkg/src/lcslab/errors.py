"""Exception types shared across the package."""


class LcslabError(Exception):
    """Base class for every error raised by lcslab."""


class ExprSyntaxError(LcslabError):
    """Malformed expression source; carries the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class CoordinateRangeError(ExprSyntaxError):
    """Coordinate symbol outside the declared ambient dimension."""


class EvaluationDomainError(LcslabError):
    """Evaluation left the domain (log of a nonpositive number, division by zero, ...)."""


class DimensionMismatchError(LcslabError):
    """Operands built over different ambient dimensions, or wrong point shape."""


class DegreeError(LcslabError):
    """Form degree out of range for the requested operation."""


class SingularSystemError(LcslabError):
    """A linear solve hit a (numerically) singular system."""


class RankAmbiguityError(LcslabError):
    """A rank decision had singular values too close to the cutoff to trust."""


class NonConvergenceError(LcslabError):
    """An iterative solver ran out of iterations."""


class RankDeficiencyError(LcslabError):
    """Constraint or momentum Jacobian lost rank; the target value is likely not regular."""


class UnsupportedGroupError(LcslabError):
    """Operation needs a group type the implementation does not cover."""


class UnknownScenarioError(LcslabError):
    """Requested scenario name is not in the registry."""


class ScenarioFormatError(LcslabError):
    """Scenario file does not match the schema."""


class PreconditionError(LcslabError):
    """A check that another check depends on did not pass."""
