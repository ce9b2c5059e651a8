"""Exception hierarchy; the CLI maps each class to a stable exit code."""


class SdmawcError(Exception):
    exit_code = 4


class InvalidArgument(SdmawcError, ValueError):
    """Bad user input: malformed config, domain violation, unknown variable."""

    exit_code = 2


class ResourceError(SdmawcError):
    """A configured enumeration or memory budget would be exceeded."""

    exit_code = 3


class ConsistencyError(SdmawcError):
    """An internal invariant failed (e.g. a strongly negative mutual information)."""

    exit_code = 4


class PreconditionError(InvalidArgument):
    """A mathematical precondition (e.g. channel degradedness) does not hold."""
