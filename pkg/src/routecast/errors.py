"""Exception types shared across the package.

Two failure families matter to callers: bad inputs (caller error, CLI exit
code 2) and broken artifacts on disk (environment error, CLI exit code 3).
"""


class ValidationError(ValueError):
    """Raised when inputs violate a documented precondition."""

    exit_code = 2


class ArtifactIOError(OSError):
    """Raised when an on-disk artifact is missing, truncated, or corrupt."""

    exit_code = 3
