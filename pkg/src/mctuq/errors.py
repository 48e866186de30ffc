"""Exception hierarchy shared by every module in the package.

The CLI maps these onto process exit codes: validation problems exit 1,
backend transport failures exit 2, degenerate data exits 3.
"""

from __future__ import annotations

__all__ = [
    "MctuqError",
    "ValidationError",
    "ParseError",
    "SchemaError",
    "ConfigurationError",
    "CapabilityError",
    "BackendError",
    "DegenerateDataError",
]


class MctuqError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(MctuqError):
    """An input, flag, or record violates a documented invariant."""


class ParseError(ValidationError):
    """A persisted file could not be parsed; message carries path and line."""


class SchemaError(ValidationError):
    """A parsed record does not match the expected schema."""


class ConfigurationError(ValidationError):
    """A run configuration is unusable (e.g. an empty leave-one-out pool)."""


class CapabilityError(MctuqError):
    """The backend cannot serve what an estimator needs (e.g. no logprobs).

    Callers treat this as "estimator unavailable", not as a run failure.
    """


class BackendError(MctuqError):
    """A backend call failed: transport error, refusal, or unparseable verdict."""


class DegenerateDataError(MctuqError):
    """A metric is undefined on the given data (e.g. single-class labels)."""
