"""Exception hierarchy shared by the simulation, analysis and configuration layers."""


class FilippovError(Exception):
    """Base class for all package errors."""


class OffSurfaceError(FilippovError, ValueError):
    """A surface-only operation was given a state away from the switching surface."""


class FlowError(FilippovError):
    """Numerical failure while integrating a Filippov solution."""


class StepTooLarge(FlowError):
    """Event bisection could not localize a switching point to the requested tolerance."""


class ZenoGuard(FlowError):
    """Too many switching events accumulated inside a single integration step."""


class NotAttracting(FilippovError):
    """Sliding was requested where the surface does not attract both branches."""


class Degenerate(FilippovError):
    """Normal components are too close for the sliding convex combination to be unique."""


class NoConvergence(FilippovError):
    """Fixed-point iteration did not reach tolerance; carries the iterate history."""

    def __init__(self, max_iter, iterates):
        super().__init__(f"no convergence after {max_iter} iterations")
        self.max_iter = max_iter
        self.iterates = iterates


class EmptyWindow(FilippovError, ValueError):
    """The requested fit window contains fewer than two samples."""


class ZeroDistance(FilippovError, ValueError):
    """A logarithmic fit met a non-positive distance."""


class ConfigError(FilippovError):
    """Scenario file could not be turned into a valid configuration."""


class ParseError(ConfigError):
    """Scenario file is not valid JSON; ``line`` is 1-based."""

    def __init__(self, path, line, msg):
        super().__init__(f"{path}:{line}: {msg}")
        self.path = path
        self.line = line


class ValidationError(ConfigError, ValueError):
    """A scenario field is missing, unknown, or out of range; ``field`` names it."""

    def __init__(self, field, msg=None):
        super().__init__(field if msg is None else f"{field}: {msg}")
        self.field = field
