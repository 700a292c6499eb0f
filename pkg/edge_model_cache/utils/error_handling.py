"""
Decorators shared by the harness and the engine.

``with_error_handling`` keeps foreign exceptions (file system, parsing) out of
the CLI: they surface as members of the ``EdgeCacheError`` hierarchy, whose
``exit_code`` the CLI returns. ``log_execution_time`` reports wall time of
whole runs and sweeps at DEBUG.
"""

import functools
import logging
import time
from typing import Callable, Tuple, Type, TypeVar

from edge_model_cache.exceptions import EdgeCacheError

R = TypeVar("R")

logger = logging.getLogger(__name__)


def with_error_handling(
    error_types: Tuple[Type[BaseException], ...] = (Exception,),
    wrap_as: Type[EdgeCacheError] = EdgeCacheError
) -> Callable[[Callable[..., R]], Callable[..., R]]:
    """
    Re-raise matching foreign exceptions as ``wrap_as``.

    Errors already in the hierarchy propagate unchanged. The original exception
    is chained as ``__cause__`` and the translation is logged at ERROR.

    Args:
        error_types (Tuple[Type[BaseException], ...]): Foreign exceptions to translate.
        wrap_as (Type[EdgeCacheError]): Replacement class; its ``exit_code`` reaches the CLI.

    Example:
        ```python
        @with_error_handling(error_types=(OSError,), wrap_as=ReportIOError)
        def write_json(payload, path):
            ...
        ```
    """
    def decorate(func: Callable[..., R]) -> Callable[..., R]:
        @functools.wraps(func)
        def translated(*args, **kwargs) -> R:
            try:
                return func(*args, **kwargs)
            except EdgeCacheError:
                raise
            except error_types as e:
                logger.error(f"{func.__name__} failed: {type(e).__name__}: {e}")
                raise wrap_as(f"{func.__name__}: {e}") from e
        return translated
    return decorate


def log_execution_time(func: Callable[..., R]) -> Callable[..., R]:
    """Log the wall time of each call at DEBUG."""
    @functools.wraps(func)
    def timed(*args, **kwargs) -> R:
        started = time.perf_counter()
        try:
            return func(*args, **kwargs)
        finally:
            logger.debug(f"{func.__name__} took {time.perf_counter() - started:.3f}s")
    return timed
