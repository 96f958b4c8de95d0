"""Exception types shared across the package."""


class MemgridError(Exception):
    """Base class for all package errors."""


class ConfigError(MemgridError):
    """Invalid or inconsistent configuration."""


class NumericFaultError(MemgridError):
    """Non-finite value detected in simulation state."""

    def __init__(self, message, unit_ids=None):
        super().__init__(message)
        self.unit_ids = list(unit_ids) if unit_ids is not None else []


class RoutingDegenerateError(MemgridError):
    """Routing cannot discriminate (e.g. all-zero input vector)."""


class InfeasibleSeparationError(MemgridError):
    """Centroid rejection sampling exhausted its attempt budget."""


class CalibrationError(MemgridError):
    """Turnover calibration received a rate outside (0, 1)."""
