# edge_model_cache/tests/conftest.py
import math

import pytest
from typer.testing import CliRunner

from edge_model_cache.cache.ledger import AotParams
from edge_model_cache.cache.policies import PolicyKind
from edge_model_cache.cache.state import CacheState
from edge_model_cache.sim.models import SimConfig
from edge_model_cache.workload.catalog import CatalogParams, ModelSpec, ServiceSpec, WorkloadConfig
from edge_model_cache.workload.sampler import Request

# Constants
TAU = 200
WINDOWS = (4096, 16384, 32768)


def make_model(model_id: int, mem_gb: float = 100.0, context_window: int = 4096, **overrides) -> ModelSpec:
    """A model with round test rates; keyword overrides replace any field."""
    fields = dict(
        model_id=model_id,
        mem_gb=mem_gb,
        context_window=context_window,
        base_loss=0.3,
        edge_rate=2.0,
        edge_tok_per_slot=2000.0,
        cloud_rate=6.0,
        cloud_latency_slots=0.8,
        switch_rate=0.05,
        load_gb_per_slot=1000.0,
    )
    fields.update(overrides)
    return ModelSpec(**fields)


def make_service(service_id: int, model_id: int = None, cot_steps: int = 3, tokens_per_step: int = TAU) -> ServiceSpec:
    return ServiceSpec(
        service_id=service_id,
        model_id=service_id if model_id is None else model_id,
        popularity_rank=service_id + 1,
        cot_steps=cot_steps,
        tokens_per_step=tokens_per_step,
    )


def make_request(slot: int, service_id: int, req_tokens: int = 400, agent_id: int = 0) -> Request:
    return Request(slot=slot, agent_id=agent_id, service_id=service_id, req_tokens=req_tokens)


def small_config(
    policy: PolicyKind = PolicyKind.LAOT,
    n_services: int = 3,
    n_slots: int = 50,
    seed: int = 7,
    capacity_gb: float = 250.0,
    **catalog_overrides
) -> SimConfig:
    """
    A few equal-sized models with room for all but one.

    Memory tiers and KV reservation are whole numbers so memory sums are exact.
    """
    catalog = dict(
        context_windows=(4096,),
        mem_tiers_gb=(100.0,),
        kv_gb_per_ktok=0.0,
        cot_steps=3,
    )
    catalog.update(catalog_overrides)
    return SimConfig(
        workload=WorkloadConfig(n_services=n_services, n_slots=n_slots, seed=seed, arrivals_per_slot_mean=3.0),
        catalog=CatalogParams(**catalog),
        policy=policy,
        capacity_gb=capacity_gb,
        check_invariants=True,
    )


# --- Fixtures ---
@pytest.fixture
def aot_params():
    """Decay 0.9 and the standard 200-token step."""
    return AotParams(gamma=0.9, tokens_per_step=TAU)


@pytest.fixture
def cache_300(aot_params):
    """An empty cache with room for two 140 GB models."""
    return CacheState(capacity_gb=300.0, aot_params=aot_params)


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def clean_env(monkeypatch):
    """Remove the simulator's environment fallbacks."""
    monkeypatch.delenv("SIMRUN_SEED", raising=False)
    monkeypatch.delenv("SIMRUN_JOBS", raising=False)


def assert_reports_match(actual, expected, rel_tol: float = 1e-9) -> None:
    """Counts must agree exactly, costs to ``rel_tol``."""
    assert len(actual.per_slot) == len(expected.per_slot)
    for mine, theirs in zip(actual.per_slot, expected.per_slot):
        mine_row, their_row = mine.as_dict(), theirs.as_dict()
        mine_costs, their_costs = mine_row.pop("breakdown"), their_row.pop("breakdown")
        mine_mean, their_mean = mine_row.pop("mean_acc_loss"), their_row.pop("mean_acc_loss")
        assert mine_row == their_row
        assert math.isclose(mine_mean, their_mean, rel_tol=rel_tol, abs_tol=1e-12)
        for name, value in mine_costs.items():
            assert math.isclose(value, their_costs[name], rel_tol=rel_tol, abs_tol=1e-12), (mine.slot, name)
    for name, value in actual.totals.as_dict().items():
        assert math.isclose(value, getattr(expected.totals, name), rel_tol=rel_tol, abs_tol=1e-12), name
