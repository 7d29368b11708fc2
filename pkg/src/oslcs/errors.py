"""Error types shared across the package.

The CLI maps these onto exit codes: input problems -> 1, failed internal
cross-checks -> 2, resource caps -> 3.
"""


class InputError(ValueError):
    """Malformed or unparseable input."""


class InconsistencyError(RuntimeError):
    """Two routes to the same number disagreed; the result cannot be trusted."""


class ResourceCapError(RuntimeError):
    """A configured enumeration or matrix-size cap was exceeded."""
