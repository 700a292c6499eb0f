"""
Policy x seed experiment orchestration.

An ``ExperimentSpec`` fixes a base ``SimConfig`` and the policies and seeds
to sweep. ``run_experiment`` executes every (policy, seed) run, possibly in a
worker pool, merges the reports in (policy, seed) order, summarizes them and
writes the report files once all runs are done.
"""

import logging
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Literal, Sequence, Tuple

import numpy as np
from pydantic import Field, field_validator

from edge_model_cache.base import BaseModel
from edge_model_cache.cache.policies import PolicyKind
from edge_model_cache.config.defaults import default
from edge_model_cache.cost.model import COMPONENTS
from edge_model_cache.exceptions import ReportIOError
from edge_model_cache.harness.reports import write_outputs
from edge_model_cache.sim.engine import run
from edge_model_cache.sim.models import RunReport, SimConfig
from edge_model_cache.utils.error_handling import log_execution_time, with_error_handling

logger = logging.getLogger(__name__)

EmitFormat = Literal["csv", "json", "both"]


class ExperimentSpec(BaseModel):
    """
    A sweep of ``policies`` x ``seeds`` over one base configuration.

    Only ``policy`` and ``workload.seed`` of the base config vary between runs.
    ``jobs`` 0 means one worker per available CPU.
    """
    base: SimConfig = Field(default_factory=SimConfig)
    policies: Tuple[PolicyKind, ...] = Field(
        default_factory=lambda: tuple(PolicyKind(kind) for kind in default("experiment.policies"))
    )
    seeds: Tuple[int, ...] = default("experiment.seeds")
    output_dir: Path = Path(default("experiment.output_dir"))
    emit: EmitFormat = default("experiment.emit")
    jobs: int = Field(default=default("experiment.jobs"), ge=0)

    @field_validator("policies")
    @classmethod
    def _check_policies(cls, value: Tuple[PolicyKind, ...]) -> Tuple[PolicyKind, ...]:
        if not value:
            raise ValueError("at least one policy is required")
        if len(set(value)) != len(value):
            raise ValueError("policies must be distinct")
        return value

    @field_validator("seeds")
    @classmethod
    def _check_seeds(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if not value:
            raise ValueError("at least one seed is required")
        if len(set(value)) != len(value):
            raise ValueError("seeds must be distinct")
        if any(not 0 <= seed < 2**64 for seed in value):
            raise ValueError("seeds must be unsigned 64-bit integers")
        return value

    def config_for(self, policy: PolicyKind, seed: int) -> SimConfig:
        """The base config with ``policy`` and ``workload.seed`` replaced."""
        workload = self.base.workload.model_copy(update={"seed": seed})
        return self.base.model_copy(update={"policy": policy, "workload": workload})

    def worker_count(self) -> int:
        return self.jobs or os.cpu_count() or 1


@dataclass
class PolicySummary:
    """
    Seed statistics of one policy.

    Attributes:
        mean_total_per_slot (float): Mean over seeds of each run's mean total per slot.
        stddev_total_per_slot (float): Sample standard deviation of the same; 0 for one seed.
        mean_components (Dict[str, float]): Per-slot component means, averaged over seeds.
        hit_ratio (float): Mean over seeds of each run's hit ratio.
        win_rate (Dict[str, float]): Fraction of seeds where this policy is strictly
            cheaper than the named policy.
    """
    policy: str
    mean_total_per_slot: float
    stddev_total_per_slot: float
    mean_components: Dict[str, float] = field(default_factory=dict)
    hit_ratio: float = 0.0
    win_rate: Dict[str, float] = field(default_factory=dict)

    def as_dict(self) -> Dict:
        return {
            "mean_total_per_slot": self.mean_total_per_slot,
            "stddev_total_per_slot": self.stddev_total_per_slot,
            "mean_components": dict(self.mean_components),
            "hit_ratio": self.hit_ratio,
            "win_rate": dict(self.win_rate),
        }


@dataclass
class ComparisonSummary:
    """Per-policy summaries in the experiment's policy order."""
    seeds: List[int]
    n_slots: int
    policies: List[PolicySummary] = field(default_factory=list)

    def by_policy(self, policy: str) -> PolicySummary:
        for summary in self.policies:
            if summary.policy == policy:
                return summary
        raise KeyError(policy)

    def best(self) -> PolicySummary:
        """The policy with the lowest mean total per slot; earlier policies win ties."""
        return min(self.policies, key=lambda summary: summary.mean_total_per_slot)

    def as_dict(self) -> Dict:
        return {
            "schema": "v1",
            "seeds": list(self.seeds),
            "n_slots": self.n_slots,
            "policies": {summary.policy: summary.as_dict() for summary in self.policies},
        }


def summarize(spec: ExperimentSpec, reports: Sequence[RunReport]) -> ComparisonSummary:
    """
    Aggregate run reports, given in (policy, seed) order, into a comparison.

    Args:
        spec (ExperimentSpec): The experiment the reports belong to.
        reports (Sequence[RunReport]): One report per (policy, seed).

    Returns:
        ComparisonSummary: Statistics per policy.
    """
    n_seeds = len(spec.seeds)
    grouped: Dict[str, List[RunReport]] = {
        policy.value: list(reports[index * n_seeds:(index + 1) * n_seeds])
        for index, policy in enumerate(spec.policies)
    }
    means = {
        policy: np.array([report.mean_total_per_slot for report in runs], dtype=np.float64)
        for policy, runs in grouped.items()
    }

    summary = ComparisonSummary(seeds=list(spec.seeds), n_slots=spec.base.workload.n_slots)
    for policy, runs in grouped.items():
        n_slots = len(runs[0].per_slot)
        components = {
            name: float(np.mean([getattr(run.totals, name) / n_slots if n_slots else 0.0 for run in runs]))
            for name in COMPONENTS
        }
        win_rate = {
            other: float(np.mean(means[policy] < means[other]))
            for other in grouped
            if other != policy
        }
        summary.policies.append(PolicySummary(
            policy=policy,
            mean_total_per_slot=float(np.mean(means[policy])),
            stddev_total_per_slot=float(np.std(means[policy], ddof=1)) if n_seeds > 1 else 0.0,
            mean_components=components,
            hit_ratio=float(np.mean([run.hit_ratio for run in runs])),
            win_rate=win_rate,
        ))
    return summary


@with_error_handling(error_types=(OSError,), wrap_as=ReportIOError)
def ensure_writable(output_dir: Path) -> Path:
    """
    Create ``output_dir`` if needed and prove it accepts files.

    Raises:
        ReportIOError: If the directory cannot be created or written.
    """
    output_dir.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryFile(dir=output_dir):
        pass
    return output_dir


def _run_one(config: SimConfig) -> RunReport:
    logger.info(f"Running {config.policy.value} seed={config.workload.seed}")
    return run(config)


def execute_runs(spec: ExperimentSpec) -> List[RunReport]:
    """
    Run every (policy, seed) pair and return the reports in that order.

    With more than one worker the runs go to a process pool; ``map`` keeps
    the submission order, so the result does not depend on scheduling.
    """
    configs = [spec.config_for(policy, seed) for policy in spec.policies for seed in spec.seeds]
    workers = min(spec.worker_count(), len(configs))
    if workers <= 1:
        return [_run_one(config) for config in configs]
    logger.info(f"Running {len(configs)} simulations on {workers} workers")
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, configs))


@log_execution_time
def run_experiment(spec: ExperimentSpec) -> Tuple[ComparisonSummary, List[RunReport]]:
    """
    Execute the sweep and write its report files.

    Args:
        spec (ExperimentSpec): A validated experiment.

    Returns:
        Tuple[ComparisonSummary, List[RunReport]]: The comparison and the run
            reports in (policy, seed) order.

    Raises:
        ReportIOError: If ``output_dir`` is not writable (checked before any run)
            or a report cannot be written.
    """
    ensure_writable(spec.output_dir)
    reports = execute_runs(spec)
    summary = summarize(spec, reports)
    written = write_outputs(spec, reports, summary)
    logger.info(f"Wrote {len(written)} files to {spec.output_dir}")
    return summary, reports
