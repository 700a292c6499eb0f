"""
Experiment configuration loading.

Config files are TOML. Every section is optional and every omitted key takes
its value from the defaults table::

    [workload]      n_services, n_agents, zipf_exponent, arrivals_per_slot_mean,
                    arrival_process, n_slots, req_tokens_min, req_tokens_max
    [catalog]       context_windows, mem_tiers_gb, kv_gb_per_ktok, base_loss,
                    edge_rate, edge_tok_per_slot, cloud_rate, cloud_latency_slots,
                    switch_rate, load_gb_per_slot, cot_steps, tokens_per_step,
                    service_models
    [policy]        kind
    [aot]           gamma, tokens_per_step
    [accuracy]      beta
    [weights]       w_acc, w_switch, w_edge, w_lat, w_cloud
    [cache]         capacity_gb, overflow_policy, check_invariants
    [experiment]    policies, seeds, output_dir, emit, jobs

Unknown sections or keys are errors, as are duplicate keys. The environment
(after loading a ``.env`` file) supplies two fallbacks: ``SIMRUN_SEED`` (one
seed or a comma-separated list) when no seeds are configured, and
``SIMRUN_JOBS`` when no job count is configured.
"""

import logging
import os
import re
import tomllib
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from pydantic import Field, ValidationError

from edge_model_cache.base import BaseModel
from edge_model_cache.cache.ledger import AotParams, OverflowPolicy
from edge_model_cache.cache.policies import PolicyKind
from edge_model_cache.config.defaults import default
from edge_model_cache.cost.model import AccuracyParams, CostWeights
from edge_model_cache.exceptions import ConfigParseError, ConfigurationError, ConfigValidationError
from edge_model_cache.harness.experiment import EmitFormat, ExperimentSpec
from edge_model_cache.workload.catalog import CatalogParams, WorkloadConfig

logger = logging.getLogger(__name__)

SEED_ENV = "SIMRUN_SEED"
JOBS_ENV = "SIMRUN_JOBS"

# tomllib reports positions only inside the message text
_POSITION = re.compile(r"\(at line (\d+), column (\d+)\)")


class PolicySection(BaseModel):
    kind: PolicyKind = PolicyKind(default("policy"))


class CacheSection(BaseModel):
    capacity_gb: float = Field(default=default("capacity_gb"), gt=0.0)
    overflow_policy: OverflowPolicy = default("overflow_policy")
    check_invariants: bool = default("check_invariants")


class ExperimentSection(BaseModel):
    """Sweep settings; unset seeds and jobs fall back to the environment, then the defaults."""
    policies: Tuple[PolicyKind, ...] = Field(
        default_factory=lambda: tuple(PolicyKind(kind) for kind in default("experiment.policies"))
    )
    seeds: Optional[Tuple[int, ...]] = None
    output_dir: Path = Path(default("experiment.output_dir"))
    emit: EmitFormat = default("experiment.emit")
    jobs: Optional[int] = None


class ConfigDocument(BaseModel):
    """
    The shape of a config file.
    """
    workload: WorkloadConfig = Field(default_factory=WorkloadConfig)
    catalog: CatalogParams = Field(default_factory=CatalogParams)
    policy: PolicySection = Field(default_factory=PolicySection)
    aot: AotParams = Field(default_factory=AotParams)
    accuracy: AccuracyParams = Field(default_factory=AccuracyParams)
    weights: CostWeights = Field(default_factory=CostWeights)
    cache: CacheSection = Field(default_factory=CacheSection)
    experiment: ExperimentSection = Field(default_factory=ExperimentSection)

    def to_spec(self) -> ExperimentSpec:
        """
        Assemble the experiment, resolving environment fallbacks.

        Raises:
            ConfigValidationError: If the assembled configuration is invalid.
        """
        section = self.experiment
        seeds = section.seeds if section.seeds is not None else env_seeds()
        jobs = section.jobs if section.jobs is not None else env_jobs()
        payload: Dict[str, Any] = {
            "base": {
                "workload": self.workload.model_dump(),
                "catalog": self.catalog.model_dump(),
                "policy": self.policy.kind,
                "weights": self.weights.model_dump(),
                "acc": self.accuracy.model_dump(),
                "aot": self.aot.model_dump(),
                **self.cache.model_dump(),
            },
            "policies": section.policies,
            "output_dir": section.output_dir,
            "emit": section.emit,
        }
        if seeds is not None:
            payload["seeds"] = seeds
        if jobs is not None:
            payload["jobs"] = jobs
        return validate_spec(payload)


def format_violations(error: ValidationError) -> List[str]:
    """One ``dotted.field: message`` line per pydantic error."""
    violations = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "config"
        violations.append(f"{location}: {item['msg']}")
    return violations


def validate_spec(payload: Dict[str, Any]) -> ExperimentSpec:
    """
    Validate an experiment given as plain data.

    Raises:
        ConfigValidationError: Listing every violated field.
    """
    try:
        return ExperimentSpec.model_validate(payload)
    except ValidationError as e:
        raise ConfigValidationError(format_violations(e)) from e


def env_seeds() -> Optional[Tuple[int, ...]]:
    """
    Seeds from ``SIMRUN_SEED``, or None when it is unset.

    Raises:
        ConfigValidationError: If the variable is not a comma-separated list of integers.
    """
    raw = os.getenv(SEED_ENV)
    if raw is None or not raw.strip():
        return None
    try:
        return parse_seed_list(raw)
    except ValueError:
        raise ConfigValidationError([f"{SEED_ENV}: expected integers separated by commas, got '{raw}'"]) from None


def env_jobs() -> Optional[int]:
    """
    Worker count from ``SIMRUN_JOBS``, or None when it is unset.

    Raises:
        ConfigValidationError: If the variable is not an integer.
    """
    raw = os.getenv(JOBS_ENV)
    if raw is None or not raw.strip():
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigValidationError([f"{JOBS_ENV}: expected an integer, got '{raw}'"]) from None


def parse_seed_list(raw: str) -> Tuple[int, ...]:
    """Parse ``"1,2,3"`` into ``(1, 2, 3)``; raises ValueError on malformed input."""
    return tuple(int(part) for part in raw.split(","))


def _decode_error_position(error: tomllib.TOMLDecodeError) -> Tuple[str, Optional[int], Optional[int]]:
    match = _POSITION.search(str(error))
    if match is None:
        return str(error), None, None
    return str(error)[:match.start()].rstrip(), int(match.group(1)), int(match.group(2))


def parse_config(path: Path) -> ExperimentSpec:
    """
    Load an experiment from a TOML config file.

    Args:
        path (Path): The config file.

    Returns:
        ExperimentSpec: The validated experiment.

    Raises:
        ConfigurationError: If the file does not exist or cannot be read.
        ConfigParseError: If the file is not valid TOML, with line and column.
        ConfigValidationError: Listing every unknown key and violated invariant.

    Example:
        ```python
        spec = parse_config(Path("experiment.toml"))
        spec.base.workload.n_services
        # 30 when the file leaves it unset
        ```
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"Config file not found: {path}")
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        message, line, column = _decode_error_position(e)
        raise ConfigParseError(f"Cannot parse {path}: {message}", line, column) from e
    except OSError as e:
        raise ConfigurationError(f"Cannot read {path}: {e}") from e

    try:
        document = ConfigDocument.model_validate(data)
    except ValidationError as e:
        raise ConfigValidationError(format_violations(e)) from e
    logger.debug(f"Loaded config {path}")
    return document.to_spec()


def default_spec() -> ExperimentSpec:
    """The experiment used when no config file is given."""
    return ConfigDocument().to_spec()
