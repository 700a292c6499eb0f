"""
Authoritative defaults table.

Every parameter of a simulation (and of an experiment sweep) has exactly one
row here, tagged with its provenance:

- ``PAPER``: taken from the published experiment setup; the note quotes it.
- ``DECISION``: a modeling choice of this simulator; the note gives the reason.

The config models read their defaults from this table, ``simrun
--print-defaults`` renders it, and nothing mutates it at runtime.
"""

from types import MappingProxyType
from typing import Any, Dict, List, Literal, Mapping, Tuple

from edge_model_cache.base import BaseModel
from edge_model_cache.exceptions import InvalidArgumentError

Provenance = Literal["PAPER", "DECISION"]


class DefaultsEntry(BaseModel):
    """
    One row of the defaults table.
    """
    key: str  # dotted parameter path, e.g. "workload.n_services"
    value: Any
    provenance: Provenance
    note: str


_SETUP_SERVICES = "We consider 30 types of services and 10 edge LLM agents"
_SETUP_STEP = "The maximum token consumption for each CoT step is set to 200"
_SETUP_WINDOWS = (
    "The context window of LLaMA is 4K tokens, the context window of GPT-3.5-turbo "
    "is 16K tokens, and the context window of GPT-4 is 32K tokens"
)
_SETUP_SERVER = "an edge server with 64 GPUs with 80 GB memory"

_ROWS: Tuple[Tuple[str, Any, Provenance, str], ...] = (
    # workload
    ("workload.n_services", 30, "PAPER", _SETUP_SERVICES),
    ("workload.n_agents", 10, "PAPER", _SETUP_SERVICES),
    ("workload.zipf_exponent", 1.0, "DECISION", "standard Zipf popularity; request distribution is unpublished"),
    ("workload.arrivals_per_slot_mean", 5.0, "DECISION", "Poisson mean; arrival rate is unpublished"),
    ("workload.arrival_process", "poisson", "DECISION", "simplest stationary arrival process"),
    ("workload.seed", 0, "DECISION", "overridden per run by the experiment seed list"),
    ("workload.n_slots", 500, "DECISION", "horizon long enough to pass cache warm-up"),
    ("workload.req_tokens_min", 64, "DECISION", "offloaded intermediate results, lower bound"),
    ("workload.req_tokens_max", 512, "DECISION", "upper bound kept below the smallest context window"),
    # catalog
    ("catalog.context_windows", (4096, 16384, 32768), "PAPER", _SETUP_WINDOWS),
    ("catalog.mem_tiers_gb", (20.0, 80.0, 160.0), "DECISION", "weight footprints of small/medium/large global models"),
    ("catalog.kv_gb_per_ktok", 8.0, "DECISION", "KV-cache reservation per 1024 tokens of context window"),
    ("catalog.base_loss", 0.3, "DECISION", "edge accuracy loss of a model holding no thoughts"),
    ("catalog.edge_rate", 2.0, "DECISION", "edge inference cost per 1K tokens"),
    ("catalog.edge_tok_per_slot", 4000.0, "DECISION", "edge serving throughput; typical requests take 0.1-0.5 slots"),
    ("catalog.cloud_rate", 6.0, "DECISION", "cloud inference cost per 1K tokens, 3x the edge rate"),
    ("catalog.cloud_latency_slots", 0.8, "DECISION", "fixed WAN round trip"),
    ("catalog.switch_rate", 0.05, "DECISION", "switching cost per GB loaded"),
    ("catalog.load_gb_per_slot", 1600.0, "DECISION", "weight loading bandwidth; charged as edge-load latency"),
    ("catalog.cot_steps", 4, "DECISION", "CoT steps generated per edge-served request"),
    ("catalog.tokens_per_step", 200, "PAPER", _SETUP_STEP),
    ("catalog.service_models", (), "DECISION", "empty means service i is bound to model i (1:1)"),
    # policy and ledger
    ("policy", "LAOT", "DECISION", "eviction policy of a single run"),
    ("aot.gamma", 0.9, "DECISION", "per-slot decay of a thought's value"),
    ("aot.tokens_per_step", 200, "PAPER", _SETUP_STEP),
    ("acc.beta", 0.5, "DECISION", "sensitivity of accuracy loss to thought value"),
    # cost weights
    ("weights.w_acc", 10.0, "DECISION", "accuracy loss emphasized so retained thoughts pay off"),
    ("weights.w_switch", 1.0, "DECISION", "unit weight"),
    ("weights.w_edge", 1.0, "DECISION", "unit weight"),
    ("weights.w_lat", 1.0, "DECISION", "unit weight"),
    ("weights.w_cloud", 1.0, "DECISION", "unit weight"),
    # cache
    ("capacity_gb", 5120.0, "PAPER", _SETUP_SERVER),
    ("overflow_policy", "evict-model", "DECISION", "context overflow evicts the model"),
    ("check_invariants", False, "DECISION", "per-request invariant checks; tests enable them"),
    # experiment
    ("experiment.policies", ("LAOT", "FIFO", "LFU", "CLOUD_ONLY"), "DECISION", "the compared policies"),
    ("experiment.seeds", (0, 1, 2, 3, 4, 5, 6, 7, 8, 9), "DECISION", "ten seeds per policy"),
    ("experiment.output_dir", "results", "DECISION", "relative to the working directory"),
    ("experiment.emit", "both", "DECISION", "CSV and JSON"),
    ("experiment.jobs", 0, "DECISION", "0 means available parallelism"),
    # informational hardware rows, not fed into cost formulas
    ("hardware.gpu_count", 64, "PAPER", _SETUP_SERVER),
    ("hardware.gpu_mem_gb", 80, "PAPER", _SETUP_SERVER),
    ("hardware.gpu_tflops", 312, "PAPER", "80 GB memory, 312 TFLOPS"),
    ("hardware.gpu_tdp_w", 300, "PAPER", "300W max thermal design power"),
)

_TABLE: Tuple[DefaultsEntry, ...] = tuple(
    DefaultsEntry(key=key, value=value, provenance=provenance, note=note)
    for key, value, provenance, note in _ROWS
)

DEFAULT_VALUES: Mapping[str, Any] = MappingProxyType({entry.key: entry.value for entry in _TABLE})

if len(DEFAULT_VALUES) != len(_TABLE):
    raise RuntimeError("defaults table keys must be unique")


def defaults() -> List[DefaultsEntry]:
    """
    Return the full defaults table in its documented order.

    Returns:
        List[DefaultsEntry]: Every default parameter with its provenance.
    """
    return list(_TABLE)


def lookup(key: str) -> DefaultsEntry:
    """
    Return the row for a dotted parameter path.

    Args:
        key (str): Dotted path such as ``"aot.gamma"``.

    Returns:
        DefaultsEntry: The matching row.

    Raises:
        InvalidArgumentError: If the key has no row.
    """
    for entry in _TABLE:
        if entry.key == key:
            return entry
    raise InvalidArgumentError(f"No default for key '{key}'")


def default(key: str) -> Any:
    """Value of a default, used as pydantic field default."""
    return DEFAULT_VALUES[key]


def defaults_as_dict() -> Dict[str, Dict[str, Any]]:
    """JSON-ready rendering of the table keyed by parameter path."""
    return {
        entry.key: {
            "value": list(entry.value) if isinstance(entry.value, tuple) else entry.value,
            "provenance": entry.provenance,
            "note": entry.note,
        }
        for entry in _TABLE
    }
