"""
Report serialization.

Files written by an experiment under ``output_dir``:

- ``reports/<policy>_seed<seed>.json``: one run report (``emit`` json or both);
- ``per_slot.csv``: seed-averaged per-slot costs of every policy (``emit`` csv or both);
- ``summary.json``: the policy comparison (always).

All files are UTF-8 with LF line endings, and their bytes depend only on the
experiment.
"""

import csv
import json
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, List, Mapping, Sequence

from edge_model_cache.cost.model import COMPONENTS, CostBreakdown
from edge_model_cache.exceptions import InvalidArgumentError, ReportIOError
from edge_model_cache.sim.models import RunReport
from edge_model_cache.utils.error_handling import with_error_handling

if TYPE_CHECKING:
    from edge_model_cache.harness.experiment import ComparisonSummary, ExperimentSpec

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "v1"
CSV_FIELDS = ("slot", "policy", "total") + COMPONENTS


def report_to_dict(report: RunReport) -> Dict[str, Any]:
    """
    The JSON form of a run report.

    Example:
        ```python
        report_to_dict(report)
        # {"schema": "v1", "config_digest": "...", "policy": "LAOT", "seed": 0,
        #  "totals": {...}, "mean_total_per_slot": 41.2, "counts": {...}, "per_slot": [...]}
        ```
    """
    return {
        "schema": SCHEMA_VERSION,
        "config_digest": report.config_digest,
        "policy": report.policy,
        "seed": report.seed,
        "totals": report.totals.as_dict(),
        "mean_total_per_slot": report.mean_total_per_slot,
        "counts": report.counts(),
        "per_slot": [slot.as_dict() for slot in report.per_slot],
    }


@with_error_handling(error_types=(OSError,), wrap_as=ReportIOError)
def write_json(path: Path, payload: Mapping[str, Any]) -> Path:
    """Write ``payload`` as indented JSON followed by a newline."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(payload, f, indent=2)
        f.write("\n")
    return path


def seed_averaged_series(reports: Sequence[RunReport]) -> Dict[str, List[CostBreakdown]]:
    """
    Average per-slot breakdowns over the seeds of each policy.

    Args:
        reports (Sequence[RunReport]): Reports of one experiment; every report of
            a policy must cover the same number of slots.

    Returns:
        Dict[str, List[CostBreakdown]]: Per policy, one averaged breakdown per slot.
    """
    grouped: Dict[str, List[RunReport]] = {}
    for report in reports:
        grouped.setdefault(report.policy, []).append(report)

    series: Dict[str, List[CostBreakdown]] = {}
    for policy, runs in grouped.items():
        n_slots = len(runs[0].per_slot)
        if any(len(run.per_slot) != n_slots for run in runs):
            raise InvalidArgumentError(f"reports of {policy} cover different horizons")
        averaged = []
        for slot in range(n_slots):
            acc = CostBreakdown()
            for run in runs:
                acc.add(run.per_slot[slot].breakdown)
            averaged.append(CostBreakdown(**{name: value / len(runs) for name, value in acc.as_dict().items()}))
        series[policy] = averaged
    return series


@with_error_handling(error_types=(OSError,), wrap_as=ReportIOError)
def emit_csv(series: Mapping[str, Sequence[CostBreakdown]], path: Path) -> Path:
    """
    Write per-slot series as CSV.

    Rows are ordered by slot, then by policy name; values carry six
    fractional digits.

    Args:
        series (Mapping[str, Sequence[CostBreakdown]]): Per-policy series of equal length.
        path (Path): Destination file.

    Returns:
        Path: ``path``.

    Raises:
        InvalidArgumentError: If the series differ in length.
        ReportIOError: If the file cannot be written.
    """
    lengths = {len(values) for values in series.values()}
    if len(lengths) > 1:
        raise InvalidArgumentError(f"series lengths differ: {sorted(lengths)}")
    n_slots = lengths.pop() if lengths else 0

    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        for slot in range(n_slots):
            for policy in sorted(series):
                breakdown = series[policy][slot]
                row = {"slot": slot, "policy": policy, "total": f"{breakdown.total:.6f}"}
                row.update({name: f"{getattr(breakdown, name):.6f}" for name in COMPONENTS})
                writer.writerow(row)
    return path


def report_path(output_dir: Path, report: RunReport) -> Path:
    return output_dir / "reports" / f"{report.policy}_seed{report.seed}.json"


def write_outputs(
    spec: "ExperimentSpec",
    reports: Sequence[RunReport],
    summary: "ComparisonSummary"
) -> List[Path]:
    """
    Write every file of an experiment in a fixed order.

    Returns:
        List[Path]: The files written.
    """
    written: List[Path] = []
    if spec.emit in ("json", "both"):
        for report in reports:
            written.append(write_json(report_path(spec.output_dir, report), report_to_dict(report)))
    if spec.emit in ("csv", "both"):
        written.append(emit_csv(seed_averaged_series(reports), spec.output_dir / "per_slot.csv"))
    written.append(write_json(spec.output_dir / "summary.json", summary.as_dict()))
    for path in written:
        logger.debug(f"Wrote {path}")
    return written
