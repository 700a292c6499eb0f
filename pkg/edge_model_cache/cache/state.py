"""
Memory-budgeted model cache state.

``CacheState`` owns the resident models of one run, their thought ledgers and
the bookkeeping the eviction policies read (load slot, access count).
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List

from edge_model_cache.cache.ledger import AotParams, Ledger
from edge_model_cache.config.defaults import default
from edge_model_cache.exceptions import InvalidArgumentError, InvariantViolationError
from edge_model_cache.workload.catalog import ModelSpec

logger = logging.getLogger(__name__)

# used_gb is a running float sum; recomputation may differ by rounding only
_GB_TOLERANCE = 1e-6


@dataclass(slots=True)
class CacheEntry:
    """A resident model."""
    model: ModelSpec
    ledger: Ledger
    load_slot: int
    access_count: int = 1


class CacheState:
    """
    Resident models under a memory budget.

    Attributes:
        capacity_gb (float): Memory budget.
        aot_params (AotParams): Parameters of every entry's running ledger value.
        entries (Dict[int, CacheEntry]): Resident models by id, in load order.
        used_gb (float): Sum of ``mem_gb`` over entries.
    """

    def __init__(self, capacity_gb: float = default("capacity_gb"), aot_params: AotParams = AotParams()) -> None:
        if capacity_gb <= 0:
            raise InvalidArgumentError(f"capacity_gb must be positive, got {capacity_gb}")
        self.capacity_gb = capacity_gb
        self.aot_params = aot_params
        self.entries: Dict[int, CacheEntry] = {}
        self.used_gb = 0.0

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, model_id: int) -> bool:
        """True on a hit; never changes state."""
        return model_id in self.entries

    def insert(self, model: ModelSpec, now: int) -> CacheEntry:
        """
        Place a model with an empty ledger; the caller has made room.

        Raises:
            InvalidArgumentError: If the model is already resident.
            InvariantViolationError: If the model does not fit.
        """
        if model.model_id in self.entries:
            raise InvalidArgumentError(f"model {model.model_id} is already cached")
        if self.used_gb + model.mem_gb > self.capacity_gb + _GB_TOLERANCE:
            raise InvariantViolationError(
                f"inserting model {model.model_id} ({model.mem_gb} GB) exceeds capacity "
                f"({self.used_gb:.3f}/{self.capacity_gb} GB used)"
            )
        entry = CacheEntry(model=model, ledger=Ledger(self.aot_params), load_slot=now)
        self.entries[model.model_id] = entry
        self.used_gb += model.mem_gb
        return entry

    def entry(self, model_id: int) -> CacheEntry:
        """
        The resident entry of a model.

        Raises:
            InvalidArgumentError: If the model is not cached.
        """
        try:
            return self.entries[model_id]
        except KeyError:
            raise InvalidArgumentError(f"model {model_id} is not cached") from None

    def record_access(self, model_id: int, now: int) -> "CacheState":
        """
        Count one served request against a resident model.

        Raises:
            InvalidArgumentError: If the model is not cached.
        """
        self.entry(model_id).access_count += 1
        return self

    def evict(self, model_id: int) -> "CacheState":
        """
        Remove a resident model and discard its thoughts.

        Raises:
            InvalidArgumentError: If the model is not cached.
        """
        entry = self.entries.pop(model_id, None)
        if entry is None:
            raise InvalidArgumentError(f"model {model_id} is not cached")
        self.used_gb -= entry.model.mem_gb
        if not self.entries:
            self.used_gb = 0.0
        entry.ledger.clear()
        return self

    def check_invariants(self) -> None:
        """
        Recompute the memory and context bookkeeping.

        Raises:
            InvariantViolationError: If used_gb drifted, exceeds capacity, or a
                ledger's token total disagrees with its thoughts.
        """
        recomputed = sum(entry.model.mem_gb for entry in self.entries.values())
        if abs(recomputed - self.used_gb) > _GB_TOLERANCE:
            raise InvariantViolationError(f"used_gb {self.used_gb} != recomputed {recomputed}")
        if self.used_gb > self.capacity_gb + _GB_TOLERANCE:
            raise InvariantViolationError(f"used_gb {self.used_gb} exceeds capacity {self.capacity_gb}")
        for model_id, entry in self.entries.items():
            tokens = sum(thought.tokens for thought in entry.ledger.thoughts)
            if tokens != entry.ledger.token_total:
                raise InvariantViolationError(f"model {model_id} ledger token_total drifted")
            if entry.access_count < 1:
                raise InvariantViolationError(f"model {model_id} has access_count {entry.access_count}")

    def snapshot(self, now: int) -> Dict[str, Any]:
        """
        JSON-ready view of the cache for debugging.

        Example:
            ```python
            state.snapshot(now=12)
            # {"capacity_gb": 5120.0, "used_gb": 140.0, "entries": [{"model_id": 3, ...}]}
            ```
        """
        rows: List[Dict[str, Any]] = [
            {
                "model_id": model_id,
                "mem_gb": entry.model.mem_gb,
                "load_slot": entry.load_slot,
                "access_count": entry.access_count,
                "token_total": entry.ledger.token_total,
                "value": entry.ledger.value(now),
            }
            for model_id, entry in self.entries.items()
        ]
        return {"capacity_gb": self.capacity_gb, "used_gb": self.used_gb, "entries": rows}
