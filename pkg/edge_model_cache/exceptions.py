"""
Custom exceptions for the edge model cache simulator.

This module defines a hierarchy of custom exceptions used throughout the package
to provide more specific error handling and better error messages. Every class
carries the process exit code the ``simrun`` CLI reports for it.
"""

from typing import List, Optional


class EdgeCacheError(Exception):
    """Base exception for all edge_model_cache errors."""
    exit_code: int = 1


class ConfigurationError(EdgeCacheError):
    """
    Raised when there is a configuration issue.

    This could be due to a missing config file, invalid configuration values,
    or other configuration-related issues.
    """
    exit_code = 2


class ConfigParseError(ConfigurationError):
    """
    Raised when a config file cannot be parsed.

    Carries the line and column reported by the TOML parser when available.
    """

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class ConfigValidationError(ConfigurationError):
    """
    Raised when configuration values violate one or more invariants.

    Attributes:
        violations (List[str]): One "field: reason" string per violated invariant.
    """

    def __init__(self, violations: List[str]):
        self.violations = list(violations)
        joined = "\n  - ".join(self.violations)
        super().__init__(f"Invalid configuration:\n  - {joined}")


class InvalidArgumentError(EdgeCacheError, ValueError):
    """
    Raised when an operation is called with arguments outside its domain.

    For example a negative thought age, an unknown model id, or a negative
    thought value.
    """
    exit_code = 4


class InvariantViolationError(EdgeCacheError, AssertionError):
    """
    Raised when an internal invariant of the simulator is broken.

    This covers the memory budget, the context window, and preconditions such
    as asking an empty cache for an eviction candidate.
    """
    exit_code = 4


class ReportIOError(EdgeCacheError):
    """
    Raised when reports cannot be written.

    This could be due to an unwritable output directory or a failing write.
    """
    exit_code = 3
