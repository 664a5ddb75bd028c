"""Exception types shared across the package.

Exit-code mapping for the CLI: ConfigError -> 2, GuardError -> 3.
"""


class ConfigError(Exception):
    """Malformed or inconsistent configuration input."""


class GuardError(Exception):
    """A hard size guard was exceeded; the requested computation is infeasible."""
