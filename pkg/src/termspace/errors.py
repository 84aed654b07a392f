"""Shared exception types.

The CLI maps these onto its exit-code contract (usage=1, data=2, io=3) and
the HTTP service maps them onto status codes with a stable error-code body.
"""


class TermspaceError(Exception):
    """Base class for all package errors."""

    code = "error"


class DataError(TermspaceError):
    """Invalid data or a violated validation contract (CLI exit code 2)."""

    code = "invalid_data"


class LexiconError(DataError):
    """Dictionary file failed to parse or violates a lexicon invariant."""

    code = "invalid_lexicon"


class UnknownTermError(DataError):
    """A query named a term that is not in the model vocabulary."""

    code = "unknown_term"

    def __init__(self, term: str):
        super().__init__(f"unknown term: {term!r}")
        self.term = term


class DuplicateIdError(DataError):
    """An id that must be unique already exists in the repository."""

    code = "duplicate_id"


class NotFoundError(DataError):
    """A repository id does not resolve to a stored entity."""

    code = "not_found"


class ConfigError(DataError):
    """A training or query configuration violates its invariants."""

    code = "invalid_config"
