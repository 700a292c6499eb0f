"""
Thought ledger and Age-of-Thought value.

A ledger holds the chain-of-thought steps recorded in one cached model's
context, oldest first. A thought's Age-of-Thought is the number of slots since
it was created, and its value decays geometrically with that age:

    value = (tokens / tokens_per_step) * gamma ** age

so one standard CoT step is worth 1 when fresh. The value of a ledger is the
sum over its thoughts.
"""

import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Deque, Literal, Optional

from pydantic import Field

from edge_model_cache.base import BaseModel
from edge_model_cache.config.defaults import default
from edge_model_cache.exceptions import InvalidArgumentError

logger = logging.getLogger(__name__)

OverflowPolicy = Literal["evict-model", "trim-oldest"]


@dataclass(frozen=True, slots=True)
class Thought:
    """One CoT step recorded in a model's context."""
    created_slot: int
    tokens: int

    def __post_init__(self) -> None:
        if self.tokens <= 0:
            raise InvalidArgumentError(f"thought tokens must be positive, got {self.tokens}")
        if self.created_slot < 0:
            raise InvalidArgumentError(f"thought created_slot must be >= 0, got {self.created_slot}")


class AotParams(BaseModel):
    """
    Decay and normalization of thought values.
    """
    gamma: float = Field(default=default("aot.gamma"), gt=0.0, le=1.0)
    tokens_per_step: int = Field(default=default("aot.tokens_per_step"), gt=0)


class WindowOutcome(str, Enum):
    """Result of checking a ledger against its model's context window."""
    FITS = "fits"
    MODEL_EVICTED = "model-evicted"
    TRIMMED = "trimmed"


def aot(thought: Thought, now: int) -> int:
    """
    Age-of-Thought in slots.

    Raises:
        InvalidArgumentError: If ``now`` precedes the thought's creation.
    """
    if now < thought.created_slot:
        raise InvalidArgumentError(f"now={now} precedes thought created at slot {thought.created_slot}")
    return now - thought.created_slot


def thought_value(thought: Thought, now: int, params: AotParams) -> float:
    """Discounted value of one thought at slot ``now``."""
    return (thought.tokens / params.tokens_per_step) * params.gamma ** aot(thought, now)


def ledger_value(ledger: "Ledger", now: int, params: AotParams) -> float:
    """
    Value of a ledger by full summation over its thoughts.

    Args:
        ledger (Ledger): The ledger to value.
        now (int): Current slot; no thought may be newer.
        params (AotParams): Decay and normalization.

    Returns:
        float: Sum of ``thought_value``; 0.0 for an empty ledger.
    """
    total = 0.0
    for thought in ledger.thoughts:
        total += thought_value(thought, now, params)
    return total


class Ledger:
    """
    Ordered thoughts of one cached model.

    When built with ``params`` the ledger also keeps a running value anchored at
    the slot of its newest thought, so ``value(now)`` costs O(1). The running
    value agrees with ``ledger_value`` up to floating-point rounding.

    Attributes:
        thoughts (Deque[Thought]): Thoughts, oldest first.
        token_total (int): Sum of ``tokens`` over ``thoughts``.
    """

    __slots__ = ("thoughts", "token_total", "_params", "_value", "_anchor")

    def __init__(self, params: Optional[AotParams] = None) -> None:
        self.thoughts: Deque[Thought] = deque()
        self.token_total = 0
        self._params = params
        self._value = 0.0
        self._anchor = 0

    def __len__(self) -> int:
        return len(self.thoughts)

    def record(self, now: int, steps: int, tokens_per_step: int) -> "Ledger":
        """
        Append ``steps`` thoughts of ``tokens_per_step`` tokens created at ``now``.

        Raises:
            InvalidArgumentError: If ``steps`` is negative or ``now`` is older
                than the newest thought.
        """
        if steps < 0:
            raise InvalidArgumentError(f"steps must be >= 0, got {steps}")
        if steps == 0:
            return self
        if self.thoughts and now < self.thoughts[-1].created_slot:
            raise InvalidArgumentError(
                f"cannot record at slot {now} after a thought of slot {self.thoughts[-1].created_slot}"
            )
        for _ in range(steps):
            self.thoughts.append(Thought(created_slot=now, tokens=tokens_per_step))
        self.token_total += steps * tokens_per_step
        if self._params is not None:
            self._value = self.value(now) + steps * tokens_per_step / self._params.tokens_per_step
            self._anchor = now
        return self

    def value(self, now: int) -> float:
        """
        Running ledger value at slot ``now``.

        Raises:
            InvalidArgumentError: If the ledger has no params or ``now`` is older
                than the newest thought.
        """
        if self._params is None:
            raise InvalidArgumentError("ledger was built without AotParams")
        if not self.thoughts:
            return 0.0
        if now < self._anchor:
            raise InvalidArgumentError(f"now={now} precedes the newest thought at slot {self._anchor}")
        return self._value * self._params.gamma ** (now - self._anchor)

    def enforce_window(self, window: int, overflow_policy: OverflowPolicy = "evict-model") -> WindowOutcome:
        """
        Check the ledger against a context window.

        Under ``evict-model`` an overflow only reports ``MODEL_EVICTED``; the
        caller removes the model. Under ``trim-oldest`` the oldest thoughts are
        dropped until the ledger fits.

        Raises:
            InvalidArgumentError: If ``window`` is not positive.
        """
        if window <= 0:
            raise InvalidArgumentError(f"context window must be positive, got {window}")
        if self.token_total <= window:
            return WindowOutcome.FITS
        if overflow_policy == "evict-model":
            return WindowOutcome.MODEL_EVICTED

        dropped = 0
        while self.token_total > window:
            oldest = self.thoughts.popleft()
            self.token_total -= oldest.tokens
            dropped += 1
        if self._params is not None:
            self._value = ledger_value(self, self._anchor, self._params)
        logger.debug(f"Trimmed {dropped} thoughts to fit a {window}-token window")
        return WindowOutcome.TRIMMED

    def clear(self) -> None:
        """Discard every thought."""
        self.thoughts.clear()
        self.token_total = 0
        self._value = 0.0
        self._anchor = 0


def record_thoughts(ledger: Ledger, now: int, steps: int, tokens_per_step: int) -> Ledger:
    """Record ``steps`` CoT steps of ``tokens_per_step`` tokens at slot ``now``."""
    return ledger.record(now, steps, tokens_per_step)


def enforce_window(ledger: Ledger, window: int, overflow_policy: OverflowPolicy = "evict-model") -> WindowOutcome:
    """Check ``ledger`` against ``window``; see ``Ledger.enforce_window``."""
    return ledger.enforce_window(window, overflow_policy)
