"""Generation and judging backends: HTTP, scripted mock, and synthetic."""

from .base import (
    Backend,
    BackendConfig,
    BackendKind,
    DEFAULT_CORRECTNESS_TEMPERATURE,
    generate_batch,
)
from .http import HttpBackend
from .mock import MockBackend
from .prompts import PROMPT_VERSION, PTrueExemplar
from .synthetic import SyntheticBackend, SyntheticWorld, make_dataset

__all__ = [
    "Backend",
    "BackendConfig",
    "BackendKind",
    "DEFAULT_CORRECTNESS_TEMPERATURE",
    "generate_batch",
    "HttpBackend",
    "MockBackend",
    "PROMPT_VERSION",
    "PTrueExemplar",
    "SyntheticBackend",
    "SyntheticWorld",
    "make_dataset",
]
