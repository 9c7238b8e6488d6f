"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes, so library code raises the most
specific class it can.
"""


class BJPError(Exception):
    """Base class for all errors raised by this package."""


class DataFormatError(BJPError, ValueError):
    """Malformed input text: edge lists, CSV datasets, model or config files."""


class InvariantError(BJPError, RuntimeError):
    """An internal consistency check failed."""
