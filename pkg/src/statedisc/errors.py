"""Exception hierarchy shared across the package."""


class StateDiscError(Exception):
    """Base class for all package errors."""


class ParameterError(StateDiscError, ValueError):
    """An argument is outside its allowed domain."""


class ResourceError(StateDiscError, RuntimeError):
    """A configured size cap (dimension, subsystem count) would be exceeded."""


class ImpossibleObservationError(StateDiscError, ValueError):
    """An outcome with zero probability under both hypotheses was supplied."""


class StalePolicyError(StateDiscError):
    """A stored policy file was built for a different problem."""


class PolicyFormatError(StateDiscError, ValueError):
    """A policy file could not be parsed."""
