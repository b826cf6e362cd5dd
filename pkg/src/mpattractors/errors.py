"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class AttractorError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(AttractorError, ValueError):
    pass


class DomainMismatch(AttractorError, ValueError):
    pass


class NotInSigma(AttractorError, ValueError):
    pass


class NoDeepTime(AttractorError):
    """Raised when the time arrow has no point of the requested depth."""

    def __init__(self, requested: float, max_depth: float):
        self.requested = float(requested)
        self.max_depth = float(max_depth)
        super().__init__(
            f"no admissible time of depth >= {requested:g} (max available depth {max_depth:g})"
        )


class TimeOutsideCone(AttractorError, ValueError):
    pass


class DirectionNotInterior(AttractorError, ValueError):
    pass


class NonFiniteState(AttractorError, FloatingPointError):
    def __init__(self, message: str, step: int | None = None):
        self.step = step
        if step is not None:
            message = f"{message} (step {step})"
        super().__init__(message)


class NotOnAttractor(AttractorError):
    pass


class NonPeriodicAxis(AttractorError, ValueError):
    pass


class NoConvergence(AttractorError):
    def __init__(self, message: str, history: list[float] | None = None):
        self.history = list(history or [])
        super().__init__(message)


class EmptyRegion(AttractorError):
    pass


class UnsupportedNonlinearity(AttractorError, ValueError):
    pass


class NotSemiInvariant(AttractorError):
    pass


class EmptyProfile(AttractorError, ValueError):
    pass


class ConfigError(AttractorError, ValueError):
    """Invalid experiment configuration; ``key`` names the offending entry."""

    def __init__(self, message: str, key: str | None = None):
        self.key = key
        super().__init__(message)
