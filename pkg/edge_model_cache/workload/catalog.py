"""
Model and service catalog.

Defines the cacheable global models, the service types bound to them, the
workload configuration, and ``build_catalog`` which derives a deterministic
catalog from them.
"""

import logging
from typing import List, Literal, Tuple

from pydantic import Field, field_validator, model_validator

from edge_model_cache.base import BaseModel
from edge_model_cache.config.defaults import default
from edge_model_cache.exceptions import InvalidArgumentError

logger = logging.getLogger(__name__)

KTOK = 1024  # tokens per "K" of context window


class ModelSpec(BaseModel):
    """
    A cacheable global model.

    Costs are in abstract cost units; latencies are in slots.
    """
    model_id: int = Field(ge=0)
    mem_gb: float = Field(gt=0)  # resident footprint, weights plus KV reservation
    context_window: int = Field(gt=0)  # tokens
    base_loss: float = Field(ge=0.0, le=1.0)
    edge_rate: float = Field(ge=0.0)  # per 1K tokens
    edge_tok_per_slot: float = Field(gt=0.0)
    cloud_rate: float = Field(ge=0.0)  # per 1K tokens
    cloud_latency_slots: float = Field(ge=0.0)
    switch_rate: float = Field(ge=0.0)  # per GB loaded
    load_gb_per_slot: float = Field(default=default("catalog.load_gb_per_slot"), gt=0.0)


class ServiceSpec(BaseModel):
    """
    A service type bound to exactly one model.
    """
    service_id: int = Field(ge=0)
    model_id: int = Field(ge=0)
    popularity_rank: int = Field(ge=1)
    cot_steps: int = Field(ge=0)
    tokens_per_step: int = Field(default=default("catalog.tokens_per_step"), gt=0)


class WorkloadConfig(BaseModel):
    """
    Request stream parameters.
    """
    n_services: int = Field(default=default("workload.n_services"), ge=1)
    n_agents: int = Field(default=default("workload.n_agents"), ge=1)
    zipf_exponent: float = Field(default=default("workload.zipf_exponent"), ge=0.0)
    arrivals_per_slot_mean: float = Field(default=default("workload.arrivals_per_slot_mean"), ge=0.0)
    arrival_process: Literal["poisson", "constant"] = default("workload.arrival_process")
    seed: int = Field(default=default("workload.seed"), ge=0, lt=2**64)
    n_slots: int = Field(default=default("workload.n_slots"), ge=0)
    req_tokens_min: int = Field(default=default("workload.req_tokens_min"), gt=0)
    req_tokens_max: int = Field(default=default("workload.req_tokens_max"), gt=0)

    @model_validator(mode="after")
    def _check_token_range(self) -> "WorkloadConfig":
        if self.req_tokens_min > self.req_tokens_max:
            raise ValueError("req_tokens_min must not exceed req_tokens_max")
        return self


class CatalogParams(BaseModel):
    """
    Per-model and per-service defaults from which ``build_catalog`` derives the catalog.

    ``context_windows`` and ``mem_tiers_gb`` are cycled over model ids in step.
    A non-empty ``service_models`` binds service i to ``service_models[i]``
    (many services may share a model); empty means service i uses model i.
    """
    context_windows: Tuple[int, ...] = default("catalog.context_windows")
    mem_tiers_gb: Tuple[float, ...] = default("catalog.mem_tiers_gb")
    kv_gb_per_ktok: float = Field(default=default("catalog.kv_gb_per_ktok"), ge=0.0)
    base_loss: float = Field(default=default("catalog.base_loss"), ge=0.0, le=1.0)
    edge_rate: float = Field(default=default("catalog.edge_rate"), ge=0.0)
    edge_tok_per_slot: float = Field(default=default("catalog.edge_tok_per_slot"), gt=0.0)
    cloud_rate: float = Field(default=default("catalog.cloud_rate"), ge=0.0)
    cloud_latency_slots: float = Field(default=default("catalog.cloud_latency_slots"), ge=0.0)
    switch_rate: float = Field(default=default("catalog.switch_rate"), ge=0.0)
    load_gb_per_slot: float = Field(default=default("catalog.load_gb_per_slot"), gt=0.0)
    cot_steps: int = Field(default=default("catalog.cot_steps"), ge=0)
    tokens_per_step: int = Field(default=default("catalog.tokens_per_step"), gt=0)
    service_models: Tuple[int, ...] = default("catalog.service_models")

    @field_validator("context_windows")
    @classmethod
    def _check_windows(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if not value or any(window <= 0 for window in value):
            raise ValueError("context_windows must be a non-empty list of positive token counts")
        return value

    @field_validator("mem_tiers_gb")
    @classmethod
    def _check_tiers(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if not value or any(tier <= 0 for tier in value):
            raise ValueError("mem_tiers_gb must be a non-empty list of positive sizes")
        return value

    @field_validator("service_models")
    @classmethod
    def _check_service_models(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if any(model_id < 0 for model_id in value):
            raise ValueError("service_models entries must be non-negative model ids")
        return value


def build_catalog(
    config: WorkloadConfig,
    model_params: CatalogParams
) -> Tuple[List[ModelSpec], List[ServiceSpec]]:
    """
    Build the model and service catalog.

    Model k takes window ``context_windows[k % len]`` and weights
    ``mem_tiers_gb[k % len]``; its resident footprint adds
    ``kv_gb_per_ktok`` per 1024 tokens of that window. Service i has
    popularity rank i + 1.

    Args:
        config (WorkloadConfig): Workload configuration (service count).
        model_params (CatalogParams): Catalog defaults and overrides.

    Returns:
        Tuple[List[ModelSpec], List[ServiceSpec]]: Models ordered by id and
            services ordered by id.

    Raises:
        InvalidArgumentError: If ``service_models`` does not give one model per service.

    Example:
        ```python
        models, services = build_catalog(WorkloadConfig(), CatalogParams())
        # len(services) == 30, models[0].context_window == 4096
        ```
    """
    if model_params.service_models:
        if len(model_params.service_models) != config.n_services:
            raise InvalidArgumentError(
                f"catalog.service_models has {len(model_params.service_models)} entries, "
                f"expected one per service ({config.n_services})"
            )
        binding = list(model_params.service_models)
        n_models = max(binding) + 1
    else:
        binding = list(range(config.n_services))
        n_models = config.n_services

    windows = model_params.context_windows
    tiers = model_params.mem_tiers_gb
    models = []
    for model_id in range(n_models):
        window = windows[model_id % len(windows)]
        mem_gb = tiers[model_id % len(tiers)] + model_params.kv_gb_per_ktok * window / KTOK
        models.append(ModelSpec(
            model_id=model_id,
            mem_gb=mem_gb,
            context_window=window,
            base_loss=model_params.base_loss,
            edge_rate=model_params.edge_rate,
            edge_tok_per_slot=model_params.edge_tok_per_slot,
            cloud_rate=model_params.cloud_rate,
            cloud_latency_slots=model_params.cloud_latency_slots,
            switch_rate=model_params.switch_rate,
            load_gb_per_slot=model_params.load_gb_per_slot,
        ))

    services = [
        ServiceSpec(
            service_id=service_id,
            model_id=model_id,
            popularity_rank=service_id + 1,
            cot_steps=model_params.cot_steps,
            tokens_per_step=model_params.tokens_per_step,
        )
        for service_id, model_id in enumerate(binding)
    ]
    logger.debug(
        f"Built catalog: {len(models)} models ({sum(m.mem_gb for m in models):.1f} GB total), "
        f"{len(services)} services"
    )
    return models, services
