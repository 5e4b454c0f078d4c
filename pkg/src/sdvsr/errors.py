"""Error hierarchy shared by every sdvsr module.

Each error carries the process exit code the CLI reports for it.
"""
from __future__ import annotations


class SdvsrError(RuntimeError):
    """Base error for sdvsr operations."""

    exit_code = 1


class DimensionError(SdvsrError, ValueError):
    """Raised when tensor shapes do not fit together."""

    exit_code = 2


class ArgumentError(SdvsrError, ValueError):
    """Raised when a scalar argument is outside its valid range."""

    exit_code = 2


class UsageError(SdvsrError):
    """Raised when an API is called in a way its contract forbids."""

    exit_code = 2


class FormatError(SdvsrError):
    """Raised when an on-disk artifact is malformed or incomplete."""

    exit_code = 3


class NumericAbortError(SdvsrError):
    """Raised when training hits a non-finite loss or gradient."""

    exit_code = 4


def describe_shapes(**shapes: tuple[int, ...]) -> str:
    """Render named shapes as ``a=(1, 3, 8, 8), b=(...)`` for error messages."""
    return ", ".join(f"{name}={tuple(shape)}" for name, shape in shapes.items())
