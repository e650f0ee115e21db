"""Error taxonomy shared by the library, the CLI, and external bindings.

Every exception carries a stable ``category`` string so callers (CLI exit
codes, foreign-language bindings) can map failures without parsing messages.
"""


class SectorMixError(Exception):
    """Base class for all library errors."""

    category = "error"

    def __str__(self):
        return f"{self.category}: {super().__str__()}"


class DomainError(SectorMixError, ValueError):
    """An argument violates an operation's stated precondition."""

    category = "domain"


class ConfigError(SectorMixError, ValueError):
    """A configuration value or flag combination is invalid."""

    category = "config"


class DataError(SectorMixError, ValueError):
    """Input data (manifest records, image contents) is malformed."""

    category = "data"


class InputOutputError(SectorMixError, OSError):
    """A filesystem read or write failed."""

    category = "io"
