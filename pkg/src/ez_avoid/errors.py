"""Exception and warning types raised by :mod:`ez_avoid`."""


class EZAvoidError(Exception):
    """Base class for every error raised by the package."""


class OriginSingularity(EZAvoidError, ValueError):
    """The vehicle is closer to the engagement-zone origin than ``EPS_D``."""


class DegenerateBoundary(EZAvoidError, ValueError):
    """Start and goal coincide, so no heading is defined."""


class NonpositiveSpeed(EZAvoidError, ValueError):
    pass


class NoBoundaryHeading(EZAvoidError, ValueError):
    """No heading puts the state on the engagement-zone boundary."""


class AmbiguousRoot(EZAvoidError, ValueError):
    """Both boundary roots are orthogonal to the requested travel direction."""


class ArccosDomain(EZAvoidError, ValueError):
    pass


class GridBuildFailure(EZAvoidError, RuntimeError):
    pass


class NumericalFailure(EZAvoidError, RuntimeError):
    """The optimizer could not maintain a nondegenerate simplex."""


class AllRunsFailed(EZAvoidError, RuntimeError):
    pass


class BadArrivalTime(EZAvoidError, ValueError):
    """Requested arrival time lies outside ``[t_fA, t_fB)``."""


class ScenarioInfeasible(EZAvoidError, RuntimeError):
    """The constrained solve did not reach feasibility.

    The partially converged report is attached as ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ConfigError(EZAvoidError, ValueError):
    pass


class ClosedFormDiscrepancy(UserWarning):
    """Closed-form Scenario C heading fails the stationarity check."""
