"""
Simulation configuration and result types.

``SimConfig`` is the validated input of one run; ``SlotMetrics`` and
``RunReport`` are its outputs.
"""

import hashlib
import json
from dataclasses import dataclass, field
from typing import Dict, List

from pydantic import Field, model_validator

from edge_model_cache.base import BaseModel
from edge_model_cache.cache.ledger import AotParams, OverflowPolicy
from edge_model_cache.cache.policies import Policy, PolicyKind
from edge_model_cache.config.defaults import default
from edge_model_cache.cost.model import AccuracyParams, CostBreakdown, CostWeights
from edge_model_cache.workload.catalog import CatalogParams, WorkloadConfig

COUNTERS = ("requests", "hits", "misses", "cloud_served", "loads", "evictions_policy", "evictions_context")


class SimConfig(BaseModel):
    """
    Everything one run depends on.

    ``policy`` is the policy kind; the runtime ``Policy`` pairs it with ``aot``.
    """
    workload: WorkloadConfig = Field(default_factory=WorkloadConfig)
    catalog: CatalogParams = Field(default_factory=CatalogParams)
    policy: PolicyKind = PolicyKind(default("policy"))
    weights: CostWeights = Field(default_factory=CostWeights)
    acc: AccuracyParams = Field(default_factory=AccuracyParams)
    aot: AotParams = Field(default_factory=AotParams)
    capacity_gb: float = Field(default=default("capacity_gb"), gt=0.0)
    overflow_policy: OverflowPolicy = default("overflow_policy")
    check_invariants: bool = default("check_invariants")

    @model_validator(mode="after")
    def _check_service_binding(self) -> "SimConfig":
        bound = self.catalog.service_models
        if bound and len(bound) != self.workload.n_services:
            raise ValueError(
                f"catalog.service_models has {len(bound)} entries but workload.n_services is "
                f"{self.workload.n_services}"
            )
        return self

    @property
    def runtime_policy(self) -> Policy:
        """The policy object the cache consults."""
        return Policy(kind=self.policy, aot_params=self.aot)

    def digest(self) -> str:
        """Stable SHA-256 of the canonical JSON form of the config."""
        canonical = json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass
class SlotMetrics:
    """
    Costs and counters of one slot.

    ``hits + misses`` equals the requests of the slot; every miss is either a
    load or served from the cloud.
    """
    slot: int
    breakdown: CostBreakdown = field(default_factory=CostBreakdown)
    requests: int = 0
    hits: int = 0
    misses: int = 0
    cloud_served: int = 0
    loads: int = 0
    evictions_policy: int = 0
    evictions_context: int = 0
    mean_acc_loss: float = 0.0  # over all requests of the slot; cloud-served count as 0

    def as_dict(self) -> Dict:
        return {
            "slot": self.slot,
            **{name: getattr(self, name) for name in COUNTERS},
            "mean_acc_loss": self.mean_acc_loss,
            "breakdown": self.breakdown.as_dict(),
        }


@dataclass
class RunReport:
    """
    Result of one run.

    ``totals`` is the exact sum of the per-slot breakdowns.
    """
    config_digest: str
    policy: str
    seed: int
    per_slot: List[SlotMetrics] = field(default_factory=list)
    totals: CostBreakdown = field(default_factory=CostBreakdown)

    @property
    def mean_total_per_slot(self) -> float:
        if not self.per_slot:
            return 0.0
        return self.totals.total / len(self.per_slot)

    def counts(self) -> Dict[str, int]:
        """Counters summed over all slots."""
        return {name: sum(getattr(slot, name) for slot in self.per_slot) for name in COUNTERS}

    @property
    def hit_ratio(self) -> float:
        counts = self.counts()
        return counts["hits"] / counts["requests"] if counts["requests"] else 0.0
