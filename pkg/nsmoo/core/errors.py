"""
Exception hierarchy for nsmoo
All solver, configuration and oracle failures derive from NsmooError
"""
from typing import Any, List, Optional, Tuple


class NsmooError(Exception):
    """Base class for all package errors"""


class PreconditionError(NsmooError):
    """An operation was called outside its documented pre-conditions"""


class DimensionMismatchError(PreconditionError):
    """Vector or matrix shapes do not agree"""


class EvaluationError(NsmooError):
    """An objective oracle returned a non-finite value"""

    def __init__(self, objective_index: int, message: str = ""):
        self.objective_index = objective_index
        super().__init__(message or f"objective {objective_index} returned a non-finite value")


class MinNormError(NsmooError):
    """Minimum-norm subproblem could not be set up"""


class EnrichmentError(NsmooError):
    """No acceptable descent direction within the enrichment/bisection budget"""

    def __init__(self, message: str, bundle: Optional[List[Tuple[int, Any]]] = None, stalled: bool = False):
        self.bundle = bundle or []
        self.stalled = stalled
        super().__init__(f"{message} (bundle size {len(self.bundle)})")


class LineSearchError(NsmooError):
    """Backtracking did not produce an admissible step"""


class DescentFailureError(NsmooError):
    """The descent solver stopped with a failure termination"""

    def __init__(self, message: str, trace: Any = None):
        self.trace = trace
        super().__init__(message)


class ParetoSetLostError(NsmooError):
    """Subdivision selection removed every box"""

    def __init__(self, depth: int):
        self.depth = depth
        super().__init__(f"Pareto set lost at depth {depth}")


class PredictorError(NsmooError):
    """Reduced Hessian is singular, no tangent available"""


class CorrectorError(NsmooError):
    """Newton corrector did not converge"""


class SignViolationError(CorrectorError):
    """Corrected point left the orthant prescribed by the sign vector"""

    def __init__(self, message: str, index: int = -1):
        self.index = index
        super().__init__(message)


class ConfigError(NsmooError):
    """Invalid run configuration"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")
