"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A parameter set violates a structural precondition (bad geometry,
    source count >= element count, malformed run configuration, ...)."""


class NumericalError(RuntimeError):
    """A numerical routine failed to converge or produced unusable output."""
