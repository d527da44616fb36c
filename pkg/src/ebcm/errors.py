class ConfigError(ValueError):
    """Invalid experiment configuration.

    ``key`` names the offending field when there is one, so the CLI can
    point at the exact line of a config file.
    """

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


class EmptyRunError(ValueError):
    """Raised when a comparison is requested on a histogram with no clicks."""
