"""Exception hierarchy.

Data problems (bad input, missing classes, infeasible fits) derive from
:class:`DataError`; failures of the numerics themselves derive from
:class:`NumericalError`. The CLI maps the two families to distinct exit codes.
"""

from __future__ import annotations


class BetaSignalError(Exception):
    """Base class for every error raised by this package."""

    def __init__(self, message: str, *, label: int | None = None, line: int | None = None):
        super().__init__(message)
        self.label = label
        self.line = line


class DataError(BetaSignalError):
    """Input data cannot support the requested computation."""


class DomainError(DataError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class FormatError(DataError):
    """Malformed input file (header or row syntax)."""


class ValidationError(DataError):
    """Well-formed input whose values violate a type invariant."""


class InsufficientDataError(DataError):
    """Too few observations."""


class ClassMissingError(DataError):
    """One of the two label classes has no observations."""


class DegenerateDistributionError(DataError):
    """Zero variance: no Beta distribution has these moments."""


class InfeasibleMomentsError(DataError):
    """Variance at or above mu*(1 - mu): no Beta distribution has these moments."""


class BoundaryGradientError(DataError):
    """A score sits on the clipping boundary, where the fit is not differentiable."""


class NumericalError(BetaSignalError):
    """A numerical routine failed to reach its tolerance."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not converge.

    Attributes:
        estimate: best integral estimate when the routine gave up.
        error: estimated absolute error of ``estimate``.
        n_intervals: number of subintervals in the final partition.
    """

    def __init__(self, message: str, *, estimate: float | None = None,
                 error: float | None = None, n_intervals: int | None = None):
        if n_intervals is not None:
            message = (f"{message} (estimate={estimate!r}, error={error!r}, "
                       f"intervals={n_intervals})")
        super().__init__(message)
        self.estimate = estimate
        self.error = error
        self.n_intervals = n_intervals


class TrainingDivergedError(NumericalError):
    """Training produced a non-finite loss or scores too collapsed to fit."""

    def __init__(self, message: str, *, epoch: int):
        super().__init__(message)
        self.epoch = epoch
