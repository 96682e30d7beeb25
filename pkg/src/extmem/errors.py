"""Exception types shared across the package.

The CLI maps these onto exit codes: usage errors exit 1, DataError 2,
CapacityError 3.
"""


class ExtmemError(Exception):
    """Base class for all package errors."""


class DataError(ExtmemError):
    """Malformed input: bad file format, out-of-range IDs, invalid config."""


class CapacityError(ExtmemError):
    """A requested generation or run would exceed the configured memory budget."""
