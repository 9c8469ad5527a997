"""Exception taxonomy for the evolution engine.

Candidate-level failures (bad programs, rejected diffs, exhausted retries)
are recoverable and recorded as score-0 rounds; infrastructure errors are
not and abort the run with a resumable checkpoint.
"""

from __future__ import annotations


class EvoloopError(Exception):
    """Base class for all engine errors."""


class ConfigError(EvoloopError):
    """Config file failed to parse; message names the line and key."""


class ValidationError(EvoloopError):
    """A value object or config field violates an invariant."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class StateError(EvoloopError):
    """A state file record is unreadable; carries the 1-based record index."""

    def __init__(self, record_index: int, message: str):
        super().__init__(f"record {record_index}: {message}")
        self.record_index = record_index


class NoCandidateError(EvoloopError):
    """A selection operation was asked to choose from an empty pool."""


class GenerationFailedError(EvoloopError):
    """The researcher exhausted its retries without a usable candidate."""


class DiffRejectedError(EvoloopError):
    """A search block was absent or ambiguous; counts as a researcher retry."""


class PayloadError(EvoloopError):
    """Candidate stdout did not contain a parseable payload line."""


class ChatError(EvoloopError):
    """Base class for chat-completion transport errors."""


class RetryableChatError(ChatError):
    """Network trouble, timeout, 429 or 5xx; safe to retry."""


class FatalChatError(ChatError):
    """Authentication or client error; retrying cannot help."""


class EmbeddingError(EvoloopError):
    """The embedding provider failed or was given invalid input."""


class InfrastructureError(EvoloopError):
    """Harness-side failure (spawn error, unwritable disk); never recorded
    as a candidate score."""
