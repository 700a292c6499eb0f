"""
Reference simulator.

A deliberately plain re-implementation of a run used to cross-check the
engine: residents are dicts, every thought value is summed from scratch, every
victim is found by a full scan and the cost formulas are written out inline.
It shares only the catalog and the request sampler with the engine.
"""

import logging
import math
from typing import Dict, List, Optional, Sequence

from edge_model_cache.cost.model import CostBreakdown
from edge_model_cache.sim.models import RunReport, SimConfig, SlotMetrics
from edge_model_cache.workload.catalog import build_catalog
from edge_model_cache.workload.sampler import Request, sample_requests, slot_rng

logger = logging.getLogger(__name__)


def _value(resident: Dict, now: int, gamma: float, unit_tokens: int) -> float:
    total = 0.0
    for created, tokens in resident["thoughts"]:
        total += (tokens / unit_tokens) * gamma ** (now - created)
    return total


def _victim(residents: Dict[int, Dict], kind: str, now: int, gamma: float, unit_tokens: int) -> int:
    candidates = residents
    if kind == "LAOT":
        values = {model_id: _value(resident, now, gamma, unit_tokens) for model_id, resident in residents.items()}
        bound = min(values.values()) * (1.0 + 1e-9)
        candidates = {model_id: residents[model_id] for model_id, value in values.items() if value <= bound}
    best_id = None
    best_key = None
    for model_id, resident in candidates.items():
        if kind in ("LAOT", "FIFO"):
            key = (resident["load"], model_id)
        else:
            key = (resident["count"], resident["load"], model_id)
        if best_key is None or key < best_key:
            best_id, best_key = model_id, key
    return best_id


def reference_run(config: SimConfig, trace: Optional[Sequence[Sequence[Request]]] = None) -> RunReport:
    """
    Simulate ``config`` the slow way.

    Args:
        config (SimConfig): Run configuration.
        trace (Optional[Sequence[Sequence[Request]]]): Requests per slot; sampled
            from the workload when omitted.

    Returns:
        RunReport: Agrees with the engine's report to floating-point rounding.
    """
    models, services = build_catalog(config.workload, config.catalog)
    kind = config.policy.value
    gamma = config.aot.gamma
    unit_tokens = config.aot.tokens_per_step
    beta = config.acc.beta
    w = config.weights
    n_slots = len(trace) if trace is not None else config.workload.n_slots

    residents: Dict[int, Dict] = {}
    report = RunReport(config_digest=config.digest(), policy=kind, seed=config.workload.seed)

    for slot in range(n_slots):
        if trace is not None:
            requests: List[Request] = list(trace[slot])
        else:
            requests = sample_requests(slot, slot_rng(config.workload.seed, slot), config.workload, services)

        row = SlotMetrics(slot=slot, requests=len(requests))
        acc = switch = edge = latency = cloud = 0.0
        for request in requests:
            service = services[request.service_id]
            model = models[service.model_id]
            tokens = request.req_tokens + service.cot_steps * service.tokens_per_step
            req_acc = req_switch = req_edge = req_latency = req_cloud = 0.0

            if model.model_id in residents:
                row.hits += 1
                residents[model.model_id]["count"] += 1
            else:
                row.misses += 1
                if kind == "CLOUD_ONLY" or model.mem_gb > config.capacity_gb:
                    row.cloud_served += 1
                    req_cloud = model.cloud_rate * tokens / 1000.0
                    req_latency = model.cloud_latency_slots
                    cloud += req_cloud
                    latency += req_latency
                    continue
                while sum(models[i].mem_gb for i in residents) + model.mem_gb > config.capacity_gb:
                    del residents[_victim(residents, kind, slot, gamma, unit_tokens)]
                    row.evictions_policy += 1
                residents[model.model_id] = {"thoughts": [], "load": slot, "count": 1}
                row.loads += 1
                req_switch = model.switch_rate * model.mem_gb
                req_latency = model.mem_gb / model.load_gb_per_slot

            resident = residents[model.model_id]
            req_acc = model.base_loss * math.exp(-beta * _value(resident, slot, gamma, unit_tokens))
            req_edge = model.edge_rate * tokens / 1000.0
            req_latency += tokens / model.edge_tok_per_slot
            acc += req_acc
            switch += req_switch
            edge += req_edge
            latency += req_latency

            resident["thoughts"].extend([(slot, service.tokens_per_step)] * service.cot_steps)
            if sum(tokens for _, tokens in resident["thoughts"]) > model.context_window:
                if config.overflow_policy == "evict-model":
                    del residents[model.model_id]
                    row.evictions_context += 1
                else:
                    while sum(tokens for _, tokens in resident["thoughts"]) > model.context_window:
                        resident["thoughts"].pop(0)

        total = w.w_acc * acc + w.w_switch * switch + w.w_edge * edge + w.w_lat * latency + w.w_cloud * cloud
        row.breakdown = CostBreakdown(
            acc_loss=acc, switch_cost=switch, edge_cost=edge, edge_latency=latency, cloud_cost=cloud, total=total
        )
        row.mean_acc_loss = acc / len(requests) if requests else 0.0
        report.per_slot.append(row)
        report.totals.add(row.breakdown)

    logger.debug(f"reference {kind} seed={config.workload.seed}: {n_slots} slots")
    return report
