import math
from collections import Counter

import numpy as np
import pytest

from edge_model_cache.exceptions import InvalidArgumentError
from edge_model_cache.workload.catalog import CatalogParams, WorkloadConfig, build_catalog
from edge_model_cache.workload.sampler import Request, arrival_count, sample_requests, slot_rng, zipf_weights


class TestZipfWeights:
    def test_single_rank(self):
        assert zipf_weights(1, 1.0).tolist() == [1.0]

    def test_zero_exponent_is_uniform(self):
        assert zipf_weights(4, 0.0).tolist() == pytest.approx([0.25] * 4, abs=1e-15)

    def test_harmonic_normalization(self):
        assert zipf_weights(3, 1.0).tolist() == pytest.approx([6 / 11, 3 / 11, 2 / 11], abs=1e-12)

    @pytest.mark.parametrize("n, s", [(1, 0.0), (2, 0.5), (30, 1.0), (100, 2.5), (7, 0.0)])
    def test_sums_to_one_and_non_increasing(self, n, s):
        weights = zipf_weights(n, s)
        assert abs(weights.sum() - 1.0) <= 1e-12
        assert all(weights[k] >= weights[k + 1] for k in range(n - 1))

    def test_rejects_empty_support(self):
        with pytest.raises(InvalidArgumentError):
            zipf_weights(0, 1.0)

    def test_rejects_negative_exponent(self):
        with pytest.raises(InvalidArgumentError):
            zipf_weights(3, -0.1)


class TestBuildCatalog:
    def test_default_catalog_cycles_windows(self):
        models, services = build_catalog(WorkloadConfig(), CatalogParams())
        assert len(services) == 30
        assert len(models) == 30
        assert [model.context_window for model in models[:6]] == [4096, 16384, 32768] * 2
        assert {service.tokens_per_step for service in services} == {200}

    def test_services_bound_one_to_one_by_default(self):
        models, services = build_catalog(WorkloadConfig(), CatalogParams())
        assert [service.model_id for service in services] == list(range(30))
        assert [service.popularity_rank for service in services] == list(range(1, 31))

    def test_single_service_uses_model_zero(self):
        models, services = build_catalog(WorkloadConfig(n_services=1), CatalogParams())
        assert len(services) == 1
        assert services[0].model_id == 0
        assert models[0].model_id == 0

    def test_footprint_includes_kv_reservation(self):
        models, _ = build_catalog(WorkloadConfig(n_services=3), CatalogParams())
        # tiers 20/80/160 GB plus 8 GB per 1024 tokens of window
        assert [model.mem_gb for model in models] == [52.0, 208.0, 416.0]

    def test_default_catalog_exceeds_capacity(self):
        models, _ = build_catalog(WorkloadConfig(), CatalogParams())
        assert sum(model.mem_gb for model in models) > 5120.0

    def test_many_to_one_binding(self):
        models, services = build_catalog(
            WorkloadConfig(n_services=4),
            CatalogParams(service_models=(0, 0, 1, 1)),
        )
        assert len(models) == 2
        assert [service.model_id for service in services] == [0, 0, 1, 1]

    def test_binding_length_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            build_catalog(WorkloadConfig(n_services=3), CatalogParams(service_models=(0, 1)))

    def test_deterministic(self):
        assert build_catalog(WorkloadConfig(), CatalogParams()) == build_catalog(WorkloadConfig(), CatalogParams())


# Seed 42, slot 0, four arrivals per slot on average, Zipf exponent 1, 30
# services, 10 agents, 64..512 tokens. Frozen so that a change in numpy's
# generators or in the draw order shows up as a failure; regenerate with
# _reference_sample(42, 0, 4.0, 1.0, 30, 10, 64, 512).
SEED_42_SLOT_0 = [
    Request(slot=0, agent_id=7, service_id=2, req_tokens=246),
    Request(slot=0, agent_id=0, service_id=5, req_tokens=255),
    Request(slot=0, agent_id=5, service_id=0, req_tokens=119),
    Request(slot=0, agent_id=7, service_id=0, req_tokens=427),
    Request(slot=0, agent_id=5, service_id=22, req_tokens=66),
    Request(slot=0, agent_id=5, service_id=2, req_tokens=446),
    Request(slot=0, agent_id=8, service_id=0, req_tokens=492),
    Request(slot=0, agent_id=1, service_id=22, req_tokens=95),
]


def _reference_sample(seed, slot, mean, exponent, n_services, n_agents, low, high):
    """Straight-line re-derivation of the documented stream layout, for regenerating the frozen samples."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(slot,))))
    count = int(rng.poisson(mean))
    if count == 0:
        return []
    raw = [1.0 / (k + 1) ** exponent for k in range(n_services)]
    norm = sum(raw)
    weights = np.array([w / norm for w in raw])
    ranks = rng.choice(n_services, size=count, p=weights)
    agents = rng.integers(0, n_agents, size=count)
    tokens = rng.integers(low, high + 1, size=count)
    return [
        Request(slot=slot, agent_id=int(agents[i]), service_id=int(ranks[i]), req_tokens=int(tokens[i]))
        for i in range(count)
    ]


class TestSampleRequests:
    def _services(self, config):
        return build_catalog(config, CatalogParams())[1]

    def test_no_arrivals(self):
        config = WorkloadConfig(arrivals_per_slot_mean=0.0, seed=3)
        assert sample_requests(0, slot_rng(3, 0), config, self._services(config)) == []

    def test_same_inputs_same_requests(self):
        config = WorkloadConfig(seed=11)
        services = self._services(config)
        first = sample_requests(5, slot_rng(11, 5), config, services)
        second = sample_requests(5, slot_rng(11, 5), config, services)
        assert first == second

    def test_slots_are_independent_substreams(self):
        config = WorkloadConfig(seed=11, arrivals_per_slot_mean=20.0)
        services = self._services(config)
        assert sample_requests(1, slot_rng(11, 1), config, services) != sample_requests(
            2, slot_rng(11, 2), config, services
        )

    def test_seed_42_matches_frozen_sample(self):
        config = WorkloadConfig(seed=42, arrivals_per_slot_mean=4.0, zipf_exponent=1.0)
        assert sample_requests(0, slot_rng(42, 0), config, self._services(config)) == SEED_42_SLOT_0

    def test_regeneration_helper_reproduces_frozen_sample(self):
        assert _reference_sample(42, 0, 4.0, 1.0, 30, 10, 64, 512) == SEED_42_SLOT_0

    def test_request_fields_in_range(self):
        config = WorkloadConfig(seed=5, arrivals_per_slot_mean=50.0)
        services = self._services(config)
        for slot in range(20):
            for request in sample_requests(slot, slot_rng(5, slot), config, services):
                assert request.slot == slot
                assert 0 <= request.agent_id < 10
                assert 0 <= request.service_id < 30
                assert 64 <= request.req_tokens <= 512

    def test_slot_outside_horizon(self):
        config = WorkloadConfig(n_slots=10)
        with pytest.raises(InvalidArgumentError):
            sample_requests(10, slot_rng(0, 10), config, self._services(config))

    def test_constant_arrivals(self):
        config = WorkloadConfig(arrival_process="constant", arrivals_per_slot_mean=2.5)
        assert arrival_count(slot_rng(0, 0), config) == 3
        config = WorkloadConfig(arrival_process="constant", arrivals_per_slot_mean=4.0)
        services = self._services(config)
        assert all(len(sample_requests(slot, slot_rng(0, slot), config, services)) == 4 for slot in range(10))

    def test_empirical_frequencies_follow_zipf(self):
        config = WorkloadConfig(n_services=10, arrivals_per_slot_mean=1000.0, n_slots=100, seed=9)
        services = self._services(config)
        counts = Counter()
        for slot in range(config.n_slots):
            counts.update(request.service_id for request in sample_requests(slot, slot_rng(9, slot), config, services))
        total = sum(counts.values())
        assert total > 90_000
        for rank, weight in enumerate(zipf_weights(10, 1.0)):
            assert math.isclose(counts[rank] / total, weight, abs_tol=0.01)


class TestRequest:
    @pytest.mark.parametrize(
        "fields",
        [
            {"slot": -1},
            {"agent_id": -1},
            {"service_id": -2},
            {"req_tokens": 0},
            {"req_tokens": -64},
        ],
    )
    def test_rejects_invalid_fields(self, fields):
        valid = {"slot": 0, "agent_id": 0, "service_id": 0, "req_tokens": 64}
        with pytest.raises(InvalidArgumentError):
            Request(**{**valid, **fields})

    def test_accepts_smallest_valid_request(self):
        assert Request(slot=0, agent_id=0, service_id=0, req_tokens=1).req_tokens == 1


class TestWorkloadConfig:
    def test_rejects_zero_services(self):
        with pytest.raises(ValueError):
            WorkloadConfig(n_services=0)

    def test_rejects_inverted_token_range(self):
        with pytest.raises(ValueError):
            WorkloadConfig(req_tokens_min=600, req_tokens_max=500)
