"""Exception and warning types shared across the package."""


class GpuHeatError(Exception):
    """Base class for all simulator errors."""


class ConfigurationError(GpuHeatError):
    """Invalid scenario or model configuration.

    Carries every offending field so a bad config file is reported in
    one pass instead of one error at a time.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class ModelError(GpuHeatError):
    """Inconsistent thermal network, e.g. a link naming an unknown node."""


class NumericalError(GpuHeatError):
    """Integration produced a non-physical state; the run is aborted."""

    def __init__(self, message, time_s=None, node_id=None):
        super().__init__(message)
        self.time_s = time_s
        self.node_id = node_id


class SchedulerLogicError(GpuHeatError):
    """Illegal fragment state transition. A bug trap, not a recoverable
    condition: scheduler decisions must respect assignability."""


class CatalogError(GpuHeatError):
    """Hardware catalog query cannot be answered (e.g. empty kind subset)."""


class StabilityWarning(UserWarning):
    """dt exceeds the explicit-Euler stability bound; results may oscillate."""
