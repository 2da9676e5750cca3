"""Experiment runner: artifacts, parallel equivalence, sweeps, comparison."""

import pytest

from capsim.config import ConfigError, ExperimentConfig
from capsim.experiment import (
    RUN_COLUMNS,
    aggregate_columns,
    execute_experiment,
    run_experiment,
    run_sweep,
)


def tiny_config(**overrides):
    # 12 nodes sit ~50-67 m apart on the grid; widen the range so the tiny
    # network actually clusters and allocates
    data = {
        "scenario": {"node_count": 12, "sm": 2, "channel": {"node_range_m": 90.0}},
        "runs": 3,
        "modes": ["multi_task", "single_task"],
        "workers": 0,
        "trace": False,
    }
    data.update(overrides)
    return ExperimentConfig.model_validate(data)


def test_rows_per_mode_and_run():
    result = execute_experiment(tiny_config())
    assert len(result.per_run) == 6
    assert [(r["mode"], r["run_number"]) for r in result.per_run] == [
        ("multi_task", 1),
        ("multi_task", 2),
        ("multi_task", 3),
        ("single_task", 1),
        ("single_task", 2),
        ("single_task", 3),
    ]
    assert len(result.aggregate_rows) == 2
    assert result.comparison is not None
    assert result.comparison["pairs"] == 3


def test_seeds_follow_run_numbers():
    result = execute_experiment(tiny_config())
    multi = [r for r in result.per_run if r["mode"] == "multi_task"]
    assert [r["seed"] for r in multi] == [15, 16, 17]  # 12 + run + 2


def test_artifacts_written(tmp_path):
    cfg = tiny_config()
    result = run_experiment(cfg, tmp_path)
    runs_csv = (tmp_path / "runs.csv").read_text().splitlines()
    assert runs_csv[0] == ",".join(RUN_COLUMNS)
    assert len(runs_csv) == 1 + len(result.per_run)
    agg_csv = (tmp_path / "aggregate.csv").read_text().splitlines()
    assert agg_csv[0] == ",".join(aggregate_columns())
    assert len(agg_csv) == 3
    assert (tmp_path / "comparison.csv").exists()


def test_parallel_matches_sequential():
    sequential = execute_experiment(tiny_config(workers=0))
    parallel = execute_experiment(tiny_config(workers=2))
    assert parallel.per_run == sequential.per_run
    assert parallel.aggregate_rows == sequential.aggregate_rows


def test_rerun_is_byte_identical(tmp_path):
    cfg = tiny_config()
    a_dir = tmp_path / "a"
    b_dir = tmp_path / "b"
    run_experiment(cfg, a_dir)
    run_experiment(cfg, b_dir)
    for name in ("runs.csv", "aggregate.csv", "comparison.csv"):
        assert (a_dir / name).read_bytes() == (b_dir / name).read_bytes()


def test_trace_files_written(tmp_path):
    cfg = tiny_config(trace=True, runs=1, modes=["multi_task"])
    run_experiment(cfg, tmp_path)
    traces = list(tmp_path.glob("trace_*.ndjson"))
    assert len(traces) == 1
    first_line = traces[0].read_text().splitlines()[0]
    assert '"kind"' in first_line


def test_single_run_aggregate_has_empty_ci(tmp_path):
    cfg = tiny_config(runs=1, modes=["multi_task"])
    run_experiment(cfg, tmp_path)
    header, row = (tmp_path / "aggregate.csv").read_text().splitlines()
    cells = dict(zip(header.split(","), row.split(",")))
    assert cells["nat_ci95"] == ""
    assert cells["nat_mean"] != ""


def test_audit_columns_populated_when_requested():
    result = execute_experiment(tiny_config(modes=["multi_task"]), audit=True)
    for row in result.per_run:
        assert row["accepts_checked"] is not None
        assert row["soundness_violations"] == 0


def test_sweep_rows_and_artifact(tmp_path):
    cfg = tiny_config(modes=["multi_task"], runs=2)
    rows = run_sweep(cfg, "node_count", [9, 16], tmp_path)
    assert len(rows) == 2
    assert [r["value"] for r in rows] == [9, 16]
    assert (tmp_path / "sweep_node_count.csv").exists()


def test_sweep_threshold_axis():
    cfg = tiny_config(modes=["multi_task"], runs=1)
    rows = run_sweep(cfg, "threshold", [0.6, 0.8])
    assert len(rows) == 2
    assert all(r["nc_mean"] >= 1 for r in rows)


def test_sweep_rejects_unknown_axis_and_empty_values():
    cfg = tiny_config()
    with pytest.raises(ConfigError):
        run_sweep(cfg, "altitude", [1.0])
    with pytest.raises(ConfigError):
        run_sweep(cfg, "sm", [])
