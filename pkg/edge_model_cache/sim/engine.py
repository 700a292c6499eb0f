"""
Slot-driven simulation engine.

Each slot draws its requests, serves them in arrival order against the shared
cache, and folds their cost parts into the slot's breakdown. A run is the
sequence of slots over one cache that starts empty.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence

from edge_model_cache.cache.ledger import WindowOutcome
from edge_model_cache.cache.policies import admit
from edge_model_cache.cache.state import CacheState
from edge_model_cache.cost.model import (
    CostBreakdown,
    accuracy_loss,
    cloud_serve_cost,
    edge_serve_cost,
    slot_total,
    switching_cost,
    switching_latency,
)
from edge_model_cache.exceptions import InvalidArgumentError
from edge_model_cache.sim.models import RunReport, SimConfig, SlotMetrics
from edge_model_cache.utils.error_handling import log_execution_time
from edge_model_cache.workload.catalog import ModelSpec, ServiceSpec, build_catalog
from edge_model_cache.workload.sampler import Request, sample_requests, slot_rng

logger = logging.getLogger(__name__)


class Decision(str, Enum):
    """How a request was served."""
    EDGE_HIT = "edge-hit"
    EDGE_LOAD = "edge-load"
    CLOUD = "cloud"


@dataclass
class ServeOutcome:
    """
    Result of serving one request.

    ``parts`` carries the request's cost components; its ``total`` stays 0
    because weighting happens per slot.
    """
    decision: Decision
    parts: CostBreakdown = field(default_factory=CostBreakdown)
    evicted_by_policy: List[int] = field(default_factory=list)
    evicted_by_context: bool = False


def serve_request(
    state: CacheState,
    request: Request,
    service: ServiceSpec,
    model: ModelSpec,
    config: SimConfig,
    now: int
) -> ServeOutcome:
    """
    Serve one request against the cache.

    A hit counts an access; a miss asks the policy to admit the model, and a
    rejected admission sends the request to the cloud. Edge-served requests are
    charged accuracy loss from the thoughts already cached for the model, then
    append their own CoT steps; a context overflow afterwards is resolved by
    the configured overflow policy.

    Args:
        state (CacheState): The run's cache, updated in place.
        request (Request): The request, arriving at slot ``now``.
        service (ServiceSpec): The request's service.
        model (ModelSpec): The model the service is bound to.
        config (SimConfig): Run configuration.
        now (int): Current slot.

    Returns:
        ServeOutcome: The decision, cost parts and evictions caused.

    Raises:
        InvalidArgumentError: If the request, service and model do not belong together.
    """
    if request.slot != now:
        raise InvalidArgumentError(f"request of slot {request.slot} served at slot {now}")
    if request.service_id != service.service_id or service.model_id != model.model_id:
        raise InvalidArgumentError(
            f"request for service {request.service_id} does not match service "
            f"{service.service_id} / model {model.model_id}"
        )

    outcome = ServeOutcome(decision=Decision.EDGE_HIT)
    if state.lookup(model.model_id):
        state.record_access(model.model_id, now)
    else:
        admitted = admit(state, model, config.runtime_policy, now)
        if admitted.rejected_to_cloud:
            cloud_cost, latency = cloud_serve_cost(request, service, model)
            outcome.decision = Decision.CLOUD
            outcome.parts.cloud_cost = cloud_cost
            outcome.parts.edge_latency = latency
            return outcome
        outcome.decision = Decision.EDGE_LOAD
        outcome.evicted_by_policy = admitted.evicted
        outcome.parts.switch_cost = switching_cost(model)
        outcome.parts.edge_latency = switching_latency(model)

    entry = state.entry(model.model_id)
    outcome.parts.acc_loss = accuracy_loss(model, entry.ledger.value(now), config.acc)
    edge_cost, latency, _ = edge_serve_cost(request, service, model)
    outcome.parts.edge_cost = edge_cost
    outcome.parts.edge_latency += latency

    entry.ledger.record(now, service.cot_steps, service.tokens_per_step)
    if entry.ledger.enforce_window(model.context_window, config.overflow_policy) is WindowOutcome.MODEL_EVICTED:
        logger.debug(f"slot {now}: model {model.model_id} overflowed its {model.context_window}-token window")
        state.evict(model.model_id)
        outcome.evicted_by_context = True

    if config.check_invariants:
        state.check_invariants()
    return outcome


class Simulator:
    """
    One run's cache, catalog and configuration.

    Attributes:
        config (SimConfig): Run configuration.
        models (List[ModelSpec]): Catalog models by id.
        services (List[ServiceSpec]): Catalog services by id.
        state (CacheState): The cache, empty at construction.
    """

    def __init__(self, config: SimConfig) -> None:
        self.config = config
        self.models, self.services = build_catalog(config.workload, config.catalog)
        self.state = CacheState(capacity_gb=config.capacity_gb, aot_params=config.aot)

    def requests_for(self, slot: int) -> List[Request]:
        """The requests the configured workload generates in ``slot``."""
        return sample_requests(slot, slot_rng(self.config.workload.seed, slot), self.config.workload, self.services)

    def step(self, slot: int, requests: Optional[Sequence[Request]] = None) -> SlotMetrics:
        """
        Advance one slot.

        Args:
            slot (int): The slot to simulate.
            requests (Optional[Sequence[Request]]): Requests to serve instead of
                sampling the slot's own.

        Returns:
            SlotMetrics: The slot's costs and counters.
        """
        if requests is None:
            requests = self.requests_for(slot)

        metrics = SlotMetrics(slot=slot, requests=len(requests))
        breakdown = metrics.breakdown
        for request in requests:
            if not 0 <= request.service_id < len(self.services):
                raise InvalidArgumentError(f"unknown service {request.service_id} in slot {slot}")
            service = self.services[request.service_id]
            outcome = serve_request(self.state, request, service, self.models[service.model_id], self.config, slot)

            breakdown.add(outcome.parts)
            if outcome.decision is Decision.EDGE_HIT:
                metrics.hits += 1
            else:
                metrics.misses += 1
            if outcome.decision is Decision.EDGE_LOAD:
                metrics.loads += 1
            elif outcome.decision is Decision.CLOUD:
                metrics.cloud_served += 1
            metrics.evictions_policy += len(outcome.evicted_by_policy)
            metrics.evictions_context += int(outcome.evicted_by_context)

        breakdown.total = slot_total(breakdown, self.config.weights)
        metrics.mean_acc_loss = breakdown.acc_loss / len(requests) if requests else 0.0
        return metrics

    def run(self, trace: Optional[Sequence[Sequence[Request]]] = None) -> RunReport:
        """
        Simulate every slot from an empty cache.

        Args:
            trace (Optional[Sequence[Sequence[Request]]]): Requests per slot; the
                horizon is its length. Sampled from the workload when omitted.

        Returns:
            RunReport: Per-slot metrics and their totals.
        """
        n_slots = len(trace) if trace is not None else self.config.workload.n_slots
        report = RunReport(
            config_digest=self.config.digest(),
            policy=self.config.policy.value,
            seed=self.config.workload.seed,
        )
        for slot in range(n_slots):
            metrics = self.step(slot, trace[slot] if trace is not None else None)
            report.per_slot.append(metrics)
            report.totals.add(metrics.breakdown)
        logger.debug(
            f"{report.policy} seed={report.seed}: {n_slots} slots, "
            f"mean total per slot {report.mean_total_per_slot:.4f}"
        )
        return report


@log_execution_time
def run(config: SimConfig) -> RunReport:
    """
    Simulate ``config.workload.n_slots`` slots of the configured workload.

    Example:
        ```python
        report = run(SimConfig(policy=PolicyKind.FIFO))
        report.mean_total_per_slot
        ```
    """
    return Simulator(config).run()


@log_execution_time
def run_trace(config: SimConfig, trace: Sequence[Sequence[Request]]) -> RunReport:
    """Simulate a fixed trace, one request list per slot, instead of sampling."""
    return Simulator(config).run(trace)
