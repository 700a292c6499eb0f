"""CLI command running a policy x seed experiment."""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

from rich.console import Console
from rich.table import Table

from edge_model_cache.config.config import default_spec, parse_config, parse_seed_list, validate_spec
from edge_model_cache.exceptions import ConfigValidationError
from edge_model_cache.harness.experiment import ComparisonSummary, ExperimentSpec, run_experiment

logger = logging.getLogger(__name__)
console = Console()


def apply_overrides(
    spec: ExperimentSpec,
    policies: Optional[List[str]] = None,
    seeds: Optional[str] = None,
    slots: Optional[int] = None,
    out: Optional[Path] = None,
    emit: Optional[str] = None,
    jobs: Optional[int] = None
) -> ExperimentSpec:
    """
    Apply command-line flags on top of a loaded experiment.

    Args:
        spec (ExperimentSpec): The experiment from the config file or the defaults.
        policies (Optional[List[str]]): Policy names, case-insensitive.
        seeds (Optional[str]): Comma-separated seed list.
        slots (Optional[int]): Horizon override.
        out (Optional[Path]): Output directory override.
        emit (Optional[str]): ``csv``, ``json`` or ``both``.
        jobs (Optional[int]): Worker count override.

    Returns:
        ExperimentSpec: The revalidated experiment.

    Raises:
        ConfigValidationError: If a flag value is invalid.
    """
    payload: Dict[str, Any] = spec.model_dump()
    if policies:
        payload["policies"] = [name.strip().upper() for name in policies]
    if seeds is not None:
        try:
            payload["seeds"] = parse_seed_list(seeds)
        except ValueError:
            raise ConfigValidationError([f"--seeds: expected integers separated by commas, got '{seeds}'"]) from None
    if slots is not None:
        payload["base"]["workload"]["n_slots"] = slots
    if out is not None:
        payload["output_dir"] = out
    if emit is not None:
        payload["emit"] = emit
    if jobs is not None:
        payload["jobs"] = jobs
    return validate_spec(payload)


def print_summary(summary: ComparisonSummary) -> None:
    """Render the policy comparison as a table."""
    table = Table(title=f"Policy comparison ({len(summary.seeds)} seeds x {summary.n_slots} slots)")
    table.add_column("Policy", style="bold")
    table.add_column("Total/slot", justify="right")
    table.add_column("Std dev", justify="right")
    table.add_column("Hit ratio", justify="right")
    for column in ("Acc loss", "Switch", "Edge", "Latency", "Cloud"):
        table.add_column(column, justify="right")

    best = summary.best().policy
    for row in summary.policies:
        components = [f"{value:.3f}" for value in row.mean_components.values()]
        table.add_row(
            row.policy,
            f"{row.mean_total_per_slot:.3f}",
            f"{row.stddev_total_per_slot:.3f}",
            f"{row.hit_ratio:.1%}",
            *components,
            style="green" if row.policy == best else None,
        )
    console.print(table)


def run_command(
    config: Optional[Path],
    policies: Optional[List[str]],
    seeds: Optional[str],
    slots: Optional[int],
    out: Optional[Path],
    emit: Optional[str],
    jobs: Optional[int],
    summary: bool
) -> ComparisonSummary:
    """Load, override and run an experiment, optionally printing the comparison."""
    spec = parse_config(config) if config is not None else default_spec()
    spec = apply_overrides(spec, policies, seeds, slots, out, emit, jobs)
    logger.info(
        f"Experiment: {len(spec.policies)} policies x {len(spec.seeds)} seeds x "
        f"{spec.base.workload.n_slots} slots -> {spec.output_dir}"
    )
    comparison, _ = run_experiment(spec)
    if summary:
        print_summary(comparison)
    return comparison
