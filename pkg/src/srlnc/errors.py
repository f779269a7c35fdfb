"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A parameter fell outside its documented domain."""


class NumericalIntegrityError(RuntimeError):
    """A computed probability table failed a structural sanity check."""


class NotDecodableError(RuntimeError):
    """Payload recovery was attempted before the decoder reached full rank."""
