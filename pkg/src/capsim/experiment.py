"""Seeded multi-run experiment execution, CSV artifacts, and the comparison
between multi-task dispatch and the single-task baseline.

Runs are seed-isolated, so they may execute on a worker pool; results are
merged by (mode, run_number) and all artifacts are byte-reproducible.
"""

from __future__ import annotations

import dataclasses
import json
import multiprocessing
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .config import MULTI_TASK, SINGLE_TASK, ConfigError, ExperimentConfig, build_scenario
from .metrics import AGGREGATE_METRICS, RunSummary, aggregate
from .simulation import run_simulation

RUN_COLUMNS = [f.name for f in dataclasses.fields(RunSummary)] + [
    "accepts_checked",
    "soundness_violations",
    "latency_violations",
]

SWEEP_AXES = ("node_count", "sm", "threshold", "range")


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    per_run: List[dict]
    aggregate_rows: List[dict]
    comparison: Optional[dict] = None
    sweep_rows: List[dict] = field(default_factory=list)


def _run_job(args: Tuple[ExperimentConfig, str, int, bool, Optional[str]]) -> dict:
    cfg, mode, run_number, audit, trace_path = args
    scenario = build_scenario(cfg.scenario, run_number)
    params = cfg.to_sim_params()
    sink = None
    trace_file = None
    if trace_path is not None:
        trace_file = open(trace_path, "w")

        def sink(record: dict) -> None:
            trace_file.write(json.dumps(record) + "\n")

    try:
        result = run_simulation(
            scenario,
            params,
            sm=cfg.dispatch_sm(mode),
            mode=mode,
            trace_sink=sink,
            audit=audit,
        )
    finally:
        if trace_file is not None:
            trace_file.close()
    row = result.summary.as_row()
    if result.audit is not None:
        row["accepts_checked"] = result.audit.accepts_checked
        row["soundness_violations"] = len(result.audit.soundness_violations)
        row["latency_violations"] = len(result.audit.latency_violations)
    else:
        row["accepts_checked"] = None
        row["soundness_violations"] = None
        row["latency_violations"] = None
    return row


def execute_experiment(
    cfg: ExperimentConfig, output_dir: Optional[Path] = None, audit: bool = False
) -> ExperimentResult:
    """Run every (mode, run_number) job and aggregate per mode.

    Traces are written only when an output directory is given and tracing is
    enabled in the config.
    """
    jobs = []
    for mode in cfg.modes:
        for run_number in range(1, cfg.runs + 1):
            trace_path = None
            if cfg.trace and output_dir is not None:
                trace_path = str(
                    output_dir
                    / f"trace_{mode}_{cfg.scenario.node_count}n_sm{cfg.scenario.sm}_run{run_number:03d}.ndjson"
                )
            jobs.append((cfg, mode, run_number, audit, trace_path))

    if cfg.workers > 1 and len(jobs) > 1:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=cfg.workers) as pool:
            rows = pool.map(_run_job, jobs, chunksize=1)
    else:
        rows = [_run_job(job) for job in jobs]

    order = {mode: i for i, mode in enumerate(cfg.modes)}
    rows.sort(key=lambda r: (order[r["mode"]], r["run_number"]))

    aggregate_rows = []
    for mode in cfg.modes:
        mode_rows = [r for r in rows if r["mode"] == mode]
        stats = aggregate(mode_rows, AGGREGATE_METRICS)
        agg: Dict[str, object] = {
            "mode": mode,
            "node_count": cfg.scenario.node_count,
            "sm_scenario": cfg.scenario.sm,
            "sm_dispatch": cfg.dispatch_sm(mode),
            "demand": cfg.scenario.demand,
            "runs": len(mode_rows),
        }
        for metric in AGGREGATE_METRICS:
            mean, hw = stats[metric]
            agg[f"{metric}_mean"] = mean
            agg[f"{metric}_ci95"] = hw
        aggregate_rows.append(agg)

    comparison = None
    if MULTI_TASK in cfg.modes and SINGLE_TASK in cfg.modes:
        comparison = compare_modes(rows, cfg)

    return ExperimentResult(config=cfg, per_run=rows, aggregate_rows=aggregate_rows, comparison=comparison)


def compare_modes(rows: Sequence[dict], cfg: ExperimentConfig) -> dict:
    """Pair multi-task and baseline runs by run number on identical scenarios."""
    multi = {r["run_number"]: r for r in rows if r["mode"] == MULTI_TASK}
    single = {r["run_number"]: r for r in rows if r["mode"] == SINGLE_TASK}
    paired = sorted(set(multi) & set(single))
    if not paired:
        return {}
    nat_multi = [multi[k]["nat"] for k in paired]
    nat_single = [single[k]["nat"] for k in paired]
    done_multi = [multi[k]["completed"] for k in paired]
    done_single = [single[k]["completed"] for k in paired]
    ge = sum(1 for a, b in zip(done_multi, done_single) if a >= b)
    gt = sum(1 for a, b in zip(done_multi, done_single) if a > b)
    n = len(paired)
    return {
        "node_count": cfg.scenario.node_count,
        "sm_scenario": cfg.scenario.sm,
        "demand": cfg.scenario.demand,
        "pairs": n,
        "nat_mean_multi": sum(nat_multi) / n,
        "nat_mean_single": sum(nat_single) / n,
        "nat_delta_mean": (sum(nat_multi) - sum(nat_single)) / n,
        "completed_mean_multi": sum(done_multi) / n,
        "completed_mean_single": sum(done_single) / n,
        "completed_delta_mean": (sum(done_multi) - sum(done_single)) / n,
        "completed_ge_fraction": ge / n,
        "completed_gt_fraction": gt / n,
    }


def _csv_cell(value: object) -> str:
    if value is None:
        return ""
    return str(value)


def write_csv(path: Path, columns: Sequence[str], rows: Sequence[dict]) -> None:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_csv_cell(row.get(c)) for c in columns))
    path.write_text("\n".join(lines) + "\n")


def aggregate_columns() -> List[str]:
    cols = ["mode", "node_count", "sm_scenario", "sm_dispatch", "demand", "runs"]
    for metric in AGGREGATE_METRICS:
        cols.append(f"{metric}_mean")
        cols.append(f"{metric}_ci95")
    return cols


def write_artifacts(result: ExperimentResult, output_dir: Path) -> List[Path]:
    """Write runs.csv, aggregate.csv and, when both modes ran, comparison.csv."""
    output_dir.mkdir(parents=True, exist_ok=True)
    written = []
    runs_path = output_dir / "runs.csv"
    write_csv(runs_path, RUN_COLUMNS, result.per_run)
    written.append(runs_path)
    agg_path = output_dir / "aggregate.csv"
    write_csv(agg_path, aggregate_columns(), result.aggregate_rows)
    written.append(agg_path)
    if result.comparison:
        cmp_path = output_dir / "comparison.csv"
        write_csv(cmp_path, list(result.comparison.keys()), [result.comparison])
        written.append(cmp_path)
    return written


def run_experiment(cfg: ExperimentConfig, output_dir: Optional[Path] = None) -> ExperimentResult:
    """Execute an experiment and write its artifacts."""
    out = Path(cfg.output_dir) if output_dir is None else output_dir
    out.mkdir(parents=True, exist_ok=True)
    result = execute_experiment(cfg, output_dir=out)
    write_artifacts(result, out)
    return result


def _with_axis(cfg: ExperimentConfig, axis: str, value: float) -> ExperimentConfig:
    data = cfg.model_dump()
    if axis == "node_count":
        data["scenario"]["node_count"] = int(value)
    elif axis == "sm":
        data["scenario"]["sm"] = int(value)
    elif axis == "threshold":
        data["scenario"]["scale"]["join_threshold"] = float(value)
    elif axis == "range":
        data["scenario"]["channel"]["node_range_m"] = float(value)
    else:
        raise ConfigError(f"unknown sweep axis {axis!r}; choose from {', '.join(SWEEP_AXES)}")
    return ExperimentConfig.model_validate(data)


def run_sweep(
    cfg: ExperimentConfig,
    axis: str,
    values: Sequence[float],
    output_dir: Optional[Path] = None,
) -> List[dict]:
    """One aggregate row per (axis value, mode); writes sweep_<axis>.csv."""
    if not values:
        raise ConfigError("sweep values must be nonempty")
    rows: List[dict] = []
    for value in values:
        sub = _with_axis(cfg, axis, value)
        result = execute_experiment(sub)
        for agg in result.aggregate_rows:
            row = {"axis": axis, "value": value}
            row.update(agg)
            rows.append(row)
    if output_dir is not None:
        output_dir.mkdir(parents=True, exist_ok=True)
        columns = ["axis", "value"] + aggregate_columns()
        write_csv(output_dir / f"sweep_{axis}.csv", columns, rows)
    return rows
