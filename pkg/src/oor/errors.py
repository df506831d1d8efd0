class OorError(Exception):
    """Base class for errors raised by this package."""


class CapacityError(OorError):
    """A size parameter exceeds a configured ceiling."""


class InvalidSeedError(OorError, ValueError):
    pass


class KeyScheduleError(OorError, ValueError):
    pass


class TopologyError(OorError, ValueError):
    """Malformed or inconsistent topology document."""


class DegenerateModelError(OorError):
    """The availability model has no single-path mass to condition on."""


class ScenarioTooSmallError(OorError, ValueError):
    """Message space too small for the requested number of distinct keys."""


class AccessDenied(OorError):
    """A sealed layer was opened with a key that does not own it."""


class MisconfiguredCircuit(OorError):
    pass


class Blocked(OorError):
    """No candidate path is available in this trial."""
