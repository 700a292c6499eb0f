"""
Eviction policies and demand admission.

LAOT evicts the resident model whose thoughts are worth least now; FIFO the
earliest loaded; LFU the one with fewest served requests since loading.
CLOUD_ONLY never caches. Every policy breaks ties by earlier load slot, then
smaller model id.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, List, Tuple

from pydantic import Field

from edge_model_cache.base import BaseModel
from edge_model_cache.cache.ledger import AotParams
from edge_model_cache.cache.state import CacheEntry, CacheState
from edge_model_cache.exceptions import InvariantViolationError
from edge_model_cache.workload.catalog import ModelSpec

logger = logging.getLogger(__name__)

# LAoT values within this relative distance of the minimum tie; the running
# and the summed ledger value may differ in the last bits.
VALUE_REL_TOL = 1e-9


class PolicyKind(str, Enum):
    """Cache policies under comparison."""
    LAOT = "LAOT"
    FIFO = "FIFO"
    LFU = "LFU"
    CLOUD_ONLY = "CLOUD_ONLY"


class Policy(BaseModel):
    """
    An eviction policy; ``aot_params`` is read by LAOT only.
    """
    kind: PolicyKind = PolicyKind.LAOT
    aot_params: AotParams = Field(default_factory=AotParams)


@dataclass(frozen=True)
class AdmitResult:
    """Outcome of ``admit``: loaded (with victims in eviction order) or rejected to the cloud."""
    loaded: bool
    evicted: List[int] = field(default_factory=list)

    @property
    def rejected_to_cloud(self) -> bool:
        return not self.loaded


def lookup(state: CacheState, model_id: int) -> bool:
    """True iff ``model_id`` is resident."""
    return state.lookup(model_id)


def record_access(state: CacheState, model_id: int, now: int) -> CacheState:
    """Count one served request; see ``CacheState.record_access``."""
    return state.record_access(model_id, now)


def evict(state: CacheState, model_id: int) -> CacheState:
    """Remove a resident model; see ``CacheState.evict``."""
    return state.evict(model_id)


def _tie_key(entry: CacheEntry) -> Tuple[int, int]:
    return (entry.load_slot, entry.model.model_id)


def least_valued(entries: Iterable[CacheEntry], now: int) -> CacheEntry:
    """
    The entry of minimal ledger value; values within ``VALUE_REL_TOL`` of the
    minimum count as equal and fall back to the load-slot, model-id order.
    """
    valued = [(entry.ledger.value(now), entry) for entry in entries]
    lowest = min(value for value, _ in valued)
    bound = lowest * (1.0 + VALUE_REL_TOL)
    return min((entry for value, entry in valued if value <= bound), key=_tie_key)


def _sort_key(entry: CacheEntry, kind: PolicyKind) -> Tuple:
    if kind is PolicyKind.FIFO:
        return _tie_key(entry)
    return (entry.access_count,) + _tie_key(entry)


def evict_candidate(state: CacheState, policy: Policy, now: int) -> int:
    """
    The model the policy would evict at slot ``now``.

    Args:
        state (CacheState): A non-empty cache.
        policy (Policy): Any policy but CLOUD_ONLY.
        now (int): Current slot.

    Returns:
        int: The victim's model id.

    Raises:
        InvariantViolationError: If the cache is empty or the policy is CLOUD_ONLY.
    """
    if not state.entries:
        raise InvariantViolationError("evict_candidate called on an empty cache")
    if policy.kind is PolicyKind.CLOUD_ONLY:
        raise InvariantViolationError("CLOUD_ONLY has no eviction candidate")
    if policy.kind is PolicyKind.LAOT:
        victim = least_valued(state.entries.values(), now)
    else:
        victim = min(state.entries.values(), key=lambda entry: _sort_key(entry, policy.kind))
    return victim.model.model_id


def admit(state: CacheState, model: ModelSpec, policy: Policy, now: int) -> AdmitResult:
    """
    Load a missing model, evicting until it fits.

    Args:
        state (CacheState): The cache; ``model`` must not be resident.
        model (ModelSpec): The requested model.
        policy (Policy): Eviction policy.
        now (int): Current slot, becomes the entry's load slot.

    Returns:
        AdmitResult: ``loaded`` with the evicted ids, or rejected to the cloud
            (CLOUD_ONLY, or a model larger than the whole cache) with the state untouched.
    """
    if policy.kind is PolicyKind.CLOUD_ONLY:
        return AdmitResult(loaded=False)
    if model.mem_gb > state.capacity_gb:
        logger.warning(
            f"Model {model.model_id} ({model.mem_gb} GB) exceeds the cache capacity "
            f"({state.capacity_gb} GB); serving from the cloud"
        )
        return AdmitResult(loaded=False)

    evicted: List[int] = []
    while state.used_gb + model.mem_gb > state.capacity_gb:
        victim = evict_candidate(state, policy, now)
        state.evict(victim)
        evicted.append(victim)
    state.insert(model, now)
    if evicted:
        logger.debug(f"slot {now}: {policy.kind.value} loaded model {model.model_id}, evicted {evicted}")
    return AdmitResult(loaded=True, evicted=evicted)
