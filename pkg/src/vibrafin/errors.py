"""Exception types shared across the toolkit.

ValidationError covers bad inputs and broken invariants (CLI exit code 1),
NumericalError covers failures inside otherwise-valid computations
(CLI exit code 2).
"""


class VibrafinError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(VibrafinError, ValueError):
    """Invalid input value or violated type invariant."""


class OutOfRangeError(ValidationError):
    """Input outside the supported operating range (no extrapolation)."""


class ConfigurationError(ValidationError):
    """Inconsistent or unresolvable configuration."""


class NumericalError(VibrafinError, RuntimeError):
    """A numerical computation failed or is singular."""


class ResonanceSingularityError(NumericalError):
    """Undamped forced response evaluated exactly at resonance."""


class IntegrationError(NumericalError):
    """Simulation state became non-finite."""

    def __init__(self, message, t=None, component=None):
        super().__init__(message)
        self.t = t
        self.component = component


class ObjectiveError(NumericalError):
    """An optimizer objective returned a non-finite value.

    Carries the offending evaluation point in ``point``.
    """

    def __init__(self, message, point):
        super().__init__(message)
        self.point = tuple(point)
