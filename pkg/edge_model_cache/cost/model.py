"""
Five-component execution cost.

Per request the simulator charges edge accuracy loss, model switching cost,
edge inference cost, latency and cloud inference cost. A slot's components
are summed over its requests and weighted into a single total.
"""

import math
from dataclasses import dataclass
from typing import Tuple

from pydantic import Field, model_validator

from edge_model_cache.base import BaseModel
from edge_model_cache.config.defaults import default
from edge_model_cache.exceptions import InvalidArgumentError
from edge_model_cache.workload.catalog import ModelSpec, ServiceSpec
from edge_model_cache.workload.sampler import Request

COMPONENTS: Tuple[str, ...] = ("acc_loss", "switch_cost", "edge_cost", "edge_latency", "cloud_cost")


class CostWeights(BaseModel):
    """
    Non-negative weights of the five components; at least one is positive.
    """
    w_acc: float = Field(default=default("weights.w_acc"), ge=0.0)
    w_switch: float = Field(default=default("weights.w_switch"), ge=0.0)
    w_edge: float = Field(default=default("weights.w_edge"), ge=0.0)
    w_lat: float = Field(default=default("weights.w_lat"), ge=0.0)
    w_cloud: float = Field(default=default("weights.w_cloud"), ge=0.0)

    @model_validator(mode="after")
    def _check_any_positive(self) -> "CostWeights":
        if not any((self.w_acc, self.w_switch, self.w_edge, self.w_lat, self.w_cloud)):
            raise ValueError("at least one cost weight must be positive")
        return self


class AccuracyParams(BaseModel):
    """Sensitivity of edge accuracy loss to thought value."""
    beta: float = Field(default=default("acc.beta"), gt=0.0)


@dataclass
class CostBreakdown:
    """
    Component totals for one slot (or a whole run) and their weighted total.
    """
    acc_loss: float = 0.0
    switch_cost: float = 0.0
    edge_cost: float = 0.0
    edge_latency: float = 0.0
    cloud_cost: float = 0.0
    total: float = 0.0

    def components(self) -> Tuple[float, float, float, float, float]:
        return (self.acc_loss, self.switch_cost, self.edge_cost, self.edge_latency, self.cloud_cost)

    def add(self, other: "CostBreakdown") -> None:
        """Accumulate another breakdown, total included."""
        self.acc_loss += other.acc_loss
        self.switch_cost += other.switch_cost
        self.edge_cost += other.edge_cost
        self.edge_latency += other.edge_latency
        self.cloud_cost += other.cloud_cost
        self.total += other.total

    def as_dict(self) -> dict:
        return {
            "acc_loss": self.acc_loss,
            "switch_cost": self.switch_cost,
            "edge_cost": self.edge_cost,
            "edge_latency": self.edge_latency,
            "cloud_cost": self.cloud_cost,
            "total": self.total,
        }


def accuracy_loss(model: ModelSpec, thought_value: float, params: AccuracyParams) -> float:
    """
    Edge accuracy loss, ``base_loss * exp(-beta * V)``.

    Raises:
        InvalidArgumentError: If ``thought_value`` is negative.
    """
    if thought_value < 0:
        raise InvalidArgumentError(f"thought value must be >= 0, got {thought_value}")
    return model.base_loss * math.exp(-params.beta * thought_value)


def switching_cost(model: ModelSpec) -> float:
    """Cost of one load event."""
    return model.switch_rate * model.mem_gb


def switching_latency(model: ModelSpec) -> float:
    """Slots spent loading the model's weights, charged to the loading request."""
    return model.mem_gb / model.load_gb_per_slot


def tokens_processed(request: Request, service: ServiceSpec) -> int:
    """Offloaded tokens plus the CoT tokens the service generates."""
    return request.req_tokens + service.cot_steps * service.tokens_per_step


def edge_serve_cost(request: Request, service: ServiceSpec, model: ModelSpec) -> Tuple[float, float, int]:
    """
    Edge inference cost and latency of one request.

    Returns:
        Tuple[float, float, int]: ``(edge_cost, edge_latency, tokens_processed)``.

    Example:
        ```python
        # req_tokens=400, cot_steps=3, tokens_per_step=200, edge_rate=2.0
        edge_serve_cost(request, service, model)
        # (2.0, 1000 / model.edge_tok_per_slot, 1000)
        ```
    """
    tokens = tokens_processed(request, service)
    return model.edge_rate * tokens / 1000.0, tokens / model.edge_tok_per_slot, tokens


def cloud_serve_cost(request: Request, service: ServiceSpec, model: ModelSpec) -> Tuple[float, float]:
    """
    Cloud inference cost and the fixed WAN latency; cloud serving has no accuracy loss.

    Returns:
        Tuple[float, float]: ``(cloud_cost, latency)``.
    """
    tokens = tokens_processed(request, service)
    return model.cloud_rate * tokens / 1000.0, model.cloud_latency_slots


def slot_total(components: CostBreakdown, weights: CostWeights) -> float:
    """Weighted sum of the five components."""
    return (
        weights.w_acc * components.acc_loss
        + weights.w_switch * components.switch_cost
        + weights.w_edge * components.edge_cost
        + weights.w_lat * components.edge_latency
        + weights.w_cloud * components.cloud_cost
    )
