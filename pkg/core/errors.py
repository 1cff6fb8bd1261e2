# core/errors.py
# Exception types raised by the sandpile and parking engine.

from typing import Optional


class SandpileError(Exception):
    """Base class for every error raised by the engine."""


class MatrixFormatError(SandpileError):
    """Matrix input is malformed (not square, not integer, bad JSON shape)."""


class NotTopplingError(SandpileError):
    """An operation that needs a validated toppling matrix got something else."""


class InvalidRateVector(SandpileError):
    """r is not positive, or rΔ has a negative component, or has the wrong length."""


class InvalidConfiguration(SandpileError):
    """A vector used as a configuration has the wrong length or a negative entry."""


class NotCriticalError(SandpileError):
    """Attempted to topple a vertex holding fewer chips than its diagonal entry."""

    def __init__(self, vertex: int, chips: int, threshold: int):
        super().__init__(
            f"vertex {vertex} is not critical: {chips} chips < threshold {threshold}"
        )
        self.vertex = vertex
        self.chips = chips
        self.threshold = threshold


class ToppleCapExceeded(SandpileError):
    """Stabilization ran past its toppling cap: the matrix is not avalanche-finite, or the input is too large for the cap."""

    def __init__(self, cap: int):
        super().__init__(f"stabilization exceeded {cap} topplings")
        self.cap = cap


class FixedPointCapExceeded(SandpileError):
    """The recurrent-representative iteration failed to settle within its cap."""

    def __init__(self, cap: int):
        super().__init__(f"no fixed point reached after {cap} iterations")
        self.cap = cap


class BudgetExceeded(SandpileError):
    """A brute-force scan would exceed its configured budget."""

    def __init__(self, what: str, size: int, budget: int, detail: Optional[str] = None):
        message = f"{what} size {size} exceeds budget {budget}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)
        self.what = what
        self.size = size
        self.budget = budget


class UsageError(SandpileError):
    """Command-line input that cannot be acted on (missing flag, bad vector text)."""
