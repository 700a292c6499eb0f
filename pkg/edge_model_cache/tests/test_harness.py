import csv
import json
import math

import pytest

from edge_model_cache.cache.policies import PolicyKind
from edge_model_cache.cost.model import COMPONENTS, CostBreakdown
from edge_model_cache.exceptions import InvalidArgumentError, ReportIOError
from edge_model_cache.harness import experiment
from edge_model_cache.harness.experiment import ExperimentSpec, run_experiment
from edge_model_cache.harness.reports import CSV_FIELDS, emit_csv, seed_averaged_series
from edge_model_cache.tests.conftest import small_config


def _spec(tmp_path, policies=(PolicyKind.LAOT, PolicyKind.FIFO), seeds=(1, 2, 3), jobs=1, **kwargs) -> ExperimentSpec:
    return ExperimentSpec(
        base=small_config(n_slots=30),
        policies=policies,
        seeds=seeds,
        output_dir=tmp_path,
        jobs=jobs,
        **kwargs,
    )


def _read_outputs(directory):
    return {
        path.relative_to(directory).as_posix(): path.read_bytes()
        for path in sorted(directory.rglob("*"))
        if path.is_file()
    }


class TestExperimentSpec:
    def test_rejects_empty_policies(self, tmp_path):
        with pytest.raises(ValueError):
            _spec(tmp_path, policies=())

    def test_rejects_duplicate_seeds(self, tmp_path):
        with pytest.raises(ValueError):
            _spec(tmp_path, seeds=(1, 1))

    def test_rejects_empty_seeds(self, tmp_path):
        with pytest.raises(ValueError):
            _spec(tmp_path, seeds=())

    def test_config_for_changes_only_policy_and_seed(self, tmp_path):
        spec = _spec(tmp_path)
        config = spec.config_for(PolicyKind.LFU, 99)
        assert config.policy is PolicyKind.LFU
        assert config.workload.seed == 99
        assert config.model_dump(exclude={"policy", "workload"}) == spec.base.model_dump(exclude={"policy", "workload"})
        assert config.workload.model_dump(exclude={"seed"}) == spec.base.workload.model_dump(exclude={"seed"})


class TestRunExperiment:
    def test_one_run_one_report(self, tmp_path):
        run_experiment(_spec(tmp_path, policies=(PolicyKind.LAOT,), seeds=(0,)))
        assert [path.name for path in (tmp_path / "reports").iterdir()] == ["LAOT_seed0.json"]
        assert (tmp_path / "per_slot.csv").is_file()
        assert (tmp_path / "summary.json").is_file()

    def test_emit_csv_only(self, tmp_path):
        run_experiment(_spec(tmp_path, emit="csv"))
        assert not (tmp_path / "reports").exists()
        assert (tmp_path / "per_slot.csv").is_file()

    def test_same_spec_same_bytes(self, tmp_path):
        run_experiment(_spec(tmp_path / "a"))
        run_experiment(_spec(tmp_path / "b"))
        first, second = _read_outputs(tmp_path / "a"), _read_outputs(tmp_path / "b")
        assert first.keys() == second.keys()
        assert first == second

    def test_worker_pool_matches_inline(self, tmp_path):
        run_experiment(_spec(tmp_path / "inline", jobs=1))
        run_experiment(_spec(tmp_path / "pool", jobs=2))
        assert _read_outputs(tmp_path / "inline") == _read_outputs(tmp_path / "pool")

    def test_reports_merged_in_policy_seed_order(self, tmp_path):
        _, reports = run_experiment(_spec(tmp_path))
        assert [(report.policy, report.seed) for report in reports] == [
            ("LAOT", 1), ("LAOT", 2), ("LAOT", 3), ("FIFO", 1), ("FIFO", 2), ("FIFO", 3)
        ]

    def test_summary_recomputes_from_reports(self, tmp_path):
        spec = _spec(tmp_path)
        run_experiment(spec)
        summary = json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))
        assert summary["schema"] == "v1"
        per_policy = {}
        for path in sorted((tmp_path / "reports").glob("*.json")):
            report = json.loads(path.read_text(encoding="utf-8"))
            assert report["schema"] == "v1"
            assert set(report) >= {"config_digest", "policy", "seed", "totals", "per_slot"}
            per_policy.setdefault(report["policy"], []).append(report)

        for policy, reports in per_policy.items():
            means = [report["totals"]["total"] / len(report["per_slot"]) for report in reports]
            entry = summary["policies"][policy]
            assert math.isclose(entry["mean_total_per_slot"], sum(means) / len(means), rel_tol=1e-12)
            mean = sum(means) / len(means)
            stddev = math.sqrt(sum((m - mean) ** 2 for m in means) / (len(means) - 1))
            assert math.isclose(entry["stddev_total_per_slot"], stddev, rel_tol=1e-9, abs_tol=1e-12)
            for name in COMPONENTS:
                expected = sum(report["totals"][name] / len(report["per_slot"]) for report in reports) / len(reports)
                assert math.isclose(entry["mean_components"][name], expected, rel_tol=1e-12, abs_tol=1e-15)

    def test_win_rates_are_fractions(self, tmp_path):
        summary, _ = run_experiment(_spec(tmp_path, policies=tuple(PolicyKind)))
        for row in summary.policies:
            assert set(row.win_rate) == {kind.value for kind in PolicyKind} - {row.policy}
            assert all(0.0 <= rate <= 1.0 for rate in row.win_rate.values())
            assert 0.0 <= row.hit_ratio <= 1.0
        assert summary.by_policy("CLOUD_ONLY").hit_ratio == 0.0

    def test_unwritable_output_dir_fails_before_running(self, tmp_path, monkeypatch):
        blocker = tmp_path / "not-a-directory"
        blocker.write_text("x")

        def fail(spec):
            raise AssertionError("runs must not start")

        monkeypatch.setattr(experiment, "execute_runs", fail)
        with pytest.raises(ReportIOError):
            run_experiment(_spec(blocker))


def _series(n_slots, offset=0.0):
    return [
        CostBreakdown(
            acc_loss=0.123456789 + slot + offset,
            switch_cost=1.0 / 3.0,
            edge_cost=2.5 * slot,
            edge_latency=0.1,
            cloud_cost=offset,
            total=10.0 * slot + offset,
        )
        for slot in range(n_slots)
    ]


class TestEmitCsv:
    def test_zero_slots_header_only(self, tmp_path):
        path = emit_csv({"LAOT": [], "FIFO": []}, tmp_path / "out.csv")
        assert path.read_bytes() == b"slot,policy,total,acc_loss,switch_cost,edge_cost,edge_latency,cloud_cost\n"

    def test_rows_ordered_by_slot_then_policy(self, tmp_path):
        path = emit_csv({"LAOT": _series(2), "FIFO": _series(2, 1.0)}, tmp_path / "out.csv")
        with open(path, newline="", encoding="utf-8") as f:
            rows = list(csv.DictReader(f))
        assert [(row["slot"], row["policy"]) for row in rows] == [("0", "FIFO"), ("0", "LAOT"), ("1", "FIFO"), ("1", "LAOT")]

    def test_lf_line_endings_and_six_digits(self, tmp_path):
        data = emit_csv({"LAOT": _series(3)}, tmp_path / "out.csv").read_bytes()
        assert b"\r\n" not in data
        first_row = data.decode("utf-8").splitlines()[1]
        assert first_row == "0,LAOT,0.000000,0.123457,0.333333,0.000000,0.100000,0.000000"

    def test_round_trip_at_six_digits(self, tmp_path):
        series = {"LAOT": _series(5), "LFU": _series(5, 0.5)}
        path = emit_csv(series, tmp_path / "out.csv")
        with open(path, newline="", encoding="utf-8") as f:
            reader = csv.DictReader(f)
            assert tuple(reader.fieldnames) == CSV_FIELDS
            for row in reader:
                expected = series[row["policy"]][int(row["slot"])]
                for name in ("total",) + COMPONENTS:
                    assert float(row[name]) == round(getattr(expected, name), 6)

    def test_unequal_series(self, tmp_path):
        with pytest.raises(InvalidArgumentError):
            emit_csv({"LAOT": _series(2), "FIFO": _series(3)}, tmp_path / "out.csv")

    def test_seed_average(self, tmp_path):
        _, reports = run_experiment(_spec(tmp_path, policies=(PolicyKind.FIFO,), seeds=(4, 5)))
        series = seed_averaged_series(reports)
        slot = 7
        expected = (reports[0].per_slot[slot].breakdown.total + reports[1].per_slot[slot].breakdown.total) / 2
        assert series["FIFO"][slot].total == pytest.approx(expected, rel=1e-12)
