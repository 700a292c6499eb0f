"""
Deterministic per-slot request sampling.

Random stream layout
--------------------
Every slot owns an independent substream: a numpy ``Generator`` over the
PCG64 bit generator, seeded with ``SeedSequence(entropy=seed, spawn_key=(slot,))``.
The stream of slot ``t`` therefore depends only on ``(seed, t)``, never on
earlier slots, so any slot can be regenerated in isolation.

Inside a slot the draws happen in this order:

1. the arrival count, ``poisson(arrivals_per_slot_mean)`` (skipped for the
   ``constant`` arrival process, which emits ``round(mean)`` arrivals);
2. one vector of ``count`` service ranks, ``choice(n_services, p=zipf_weights)``;
3. one vector of ``count`` agent ids, ``integers(0, n_agents)``;
4. one vector of ``count`` token sizes, ``integers(req_tokens_min, req_tokens_max + 1)``.

Arrival ``i`` takes element ``i`` of each vector.
"""

import math
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from edge_model_cache.exceptions import InvalidArgumentError
from edge_model_cache.workload.catalog import ServiceSpec, WorkloadConfig


@dataclass(frozen=True, slots=True)
class Request:
    """One offloaded request from a mobile agent."""
    slot: int
    agent_id: int
    service_id: int
    req_tokens: int

    def __post_init__(self) -> None:
        if self.slot < 0:
            raise InvalidArgumentError(f"request slot must be >= 0, got {self.slot}")
        if self.agent_id < 0 or self.service_id < 0:
            raise InvalidArgumentError(
                f"request ids must be >= 0, got agent {self.agent_id}, service {self.service_id}"
            )
        if self.req_tokens <= 0:
            raise InvalidArgumentError(f"request tokens must be positive, got {self.req_tokens}")


def zipf_weights(n: int, s: float) -> np.ndarray:
    """
    Zipf popularity weights over ranks 1..n.

    Args:
        n (int): Number of ranks, at least 1.
        s (float): Exponent, non-negative; 0 gives the uniform distribution.

    Returns:
        np.ndarray: ``w`` with ``w[k]`` proportional to ``1 / (k + 1) ** s``, summing to 1.

    Raises:
        InvalidArgumentError: If ``n < 1`` or ``s < 0``.

    Example:
        ```python
        zipf_weights(3, 1.0)
        # array([0.5454..., 0.2727..., 0.1818...])
        ```
    """
    if n < 1:
        raise InvalidArgumentError(f"zipf_weights needs n >= 1, got {n}")
    if s < 0:
        raise InvalidArgumentError(f"zipf_weights needs s >= 0, got {s}")
    weights = np.arange(1, n + 1, dtype=np.float64) ** -s
    return weights / weights.sum()


def slot_rng(seed: int, slot: int) -> np.random.Generator:
    """
    The random substream owned by one slot.

    Args:
        seed (int): Run seed, a 64-bit unsigned integer.
        slot (int): Slot index.

    Returns:
        np.random.Generator: A fresh PCG64 generator for ``(seed, slot)``.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(slot,))))


def arrival_count(rng: np.random.Generator, config: WorkloadConfig) -> int:
    """Number of arrivals in a slot under the configured arrival process."""
    if config.arrival_process == "constant":
        return int(math.floor(config.arrivals_per_slot_mean + 0.5))
    return int(rng.poisson(config.arrivals_per_slot_mean))


def sample_requests(
    slot: int,
    rng: np.random.Generator,
    config: WorkloadConfig,
    services: Sequence[ServiceSpec]
) -> List[Request]:
    """
    Draw the requests arriving in one slot.

    Args:
        slot (int): Slot index in ``[0, n_slots)``.
        rng (np.random.Generator): The slot's generator, normally ``slot_rng(seed, slot)``.
            It is advanced by the draws.
        config (WorkloadConfig): Workload configuration.
        services (Sequence[ServiceSpec]): The service catalog; ranks must be 1..len.

    Returns:
        List[Request]: Requests in draw order.

    Raises:
        InvalidArgumentError: If the slot is outside the horizon.
    """
    if not 0 <= slot < config.n_slots:
        raise InvalidArgumentError(f"slot {slot} outside [0, {config.n_slots})")
    count = arrival_count(rng, config)
    if count == 0:
        return []

    by_rank = sorted(services, key=lambda service: service.popularity_rank)
    weights = zipf_weights(len(by_rank), config.zipf_exponent)
    ranks = rng.choice(len(by_rank), size=count, p=weights)
    agents = rng.integers(0, config.n_agents, size=count)
    tokens = rng.integers(config.req_tokens_min, config.req_tokens_max + 1, size=count)
    return [
        Request(
            slot=slot,
            agent_id=int(agent),
            service_id=by_rank[int(rank)].service_id,
            req_tokens=int(size),
        )
        for rank, agent, size in zip(ranks, agents, tokens)
    ]
