"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A model, channel, or configuration parameter is out of range."""


class ContractViolationError(RuntimeError):
    """An action was applied to a state that does not admit it."""


class InsufficientSamplesError(RuntimeError):
    """A statistic was requested from a run with too few deliveries."""
