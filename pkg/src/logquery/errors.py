"""Exception taxonomy shared across the pipeline.

Each class maps onto one documented CLI exit code; see cli.EXIT_CODES.
"""

from __future__ import annotations


class LogQueryError(Exception):
    """Base class for every error raised by this package."""


class InputError(LogQueryError):
    """Unusable user input: missing files, malformed records, bad config."""


class ResponseParseError(LogQueryError):
    """Model output contained no extractable script; feeds the retry loop."""


class TransportError(LogQueryError):
    """Failure talking to the model endpoint."""

    def __init__(self, message: str, retriable: bool = False):
        super().__init__(message)
        self.retriable = retriable


class CassetteError(TransportError):
    """Replay miss or malformed cassette; never retriable."""

    def __init__(self, message: str):
        super().__init__(message, retriable=False)


class InterpreterNotFoundError(LogQueryError):
    """The script interpreter is missing from the host: an environment
    problem, deliberately distinct from a script's own exec_error."""
