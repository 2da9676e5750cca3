"""Experiment runner CLI.

Subcommands mirror the service endpoints: `run` and `sweep` execute locally
by default or, with --server, post the validated config to a running service
and write the returned rows as the same CSV artifacts. `dump-scenario`
expands a scenario for audit; `serve` starts the HTTP service.

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from .capabilities import capability_names
from .config import ConfigError, ExperimentConfig, build_scenario, load_config, validate_config
from .experiment import (
    RUN_COLUMNS,
    SWEEP_AXES,
    ExperimentResult,
    aggregate_columns,
    run_experiment,
    run_sweep,
    write_csv,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capsim",
        description="Capability-similarity clustering and multi-task allocation simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run all seeded simulations for a config")
    run_p.add_argument("config", help="YAML config file")
    run_p.add_argument("-o", "--output-dir", help="artifact directory (default: config output_dir)")
    run_p.add_argument("--runs", type=int, help="override number of runs")
    run_p.add_argument("--workers", type=int, help="override worker count")
    run_p.add_argument("--server", help="execute on a remote capsim service, e.g. http://host:8000")

    sweep_p = sub.add_parser("sweep", help="re-run the experiment across one axis")
    sweep_p.add_argument("config")
    sweep_p.add_argument("--axis", required=True, choices=SWEEP_AXES)
    sweep_p.add_argument("--values", required=True, help="comma-separated axis values")
    sweep_p.add_argument("-o", "--output-dir")
    sweep_p.add_argument("--server")

    dump_p = sub.add_parser("dump-scenario", help="expand a scenario (positions, capabilities, tasks)")
    dump_p.add_argument("config")
    dump_p.add_argument("--run", type=int, default=1, help="run number to expand (default 1)")
    dump_p.add_argument("-o", "--output", help="write JSON here instead of stdout")
    dump_p.add_argument("--server")

    serve_p = sub.add_parser("serve", help="start the HTTP service")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8000)

    return parser


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    overrides = {}
    if getattr(args, "runs", None) is not None:
        overrides["runs"] = args.runs
    if getattr(args, "workers", None) is not None:
        overrides["workers"] = args.workers
    if overrides:
        # re-validate: model_copy(update=...) would skip range checks
        data = cfg.model_dump()
        data.update(overrides)
        cfg = validate_config(data, source="command-line overrides")
    return cfg


def _print_summary(result: ExperimentResult) -> None:
    for agg in result.aggregate_rows:
        rate = agg.get("allocation_rate_mean")
        rate_s = f"{rate:.3f}" if rate is not None else "n/a"
        print(
            f"[{agg['mode']}] {agg['node_count']} nodes, demand {agg['demand']}: "
            f"runs={agg['runs']} NC={agg['nc_mean']:.2f} NAT={agg['nat_mean']:.2f} "
            f"rate={rate_s} EC={agg['ec_total_j_mean']:.4f} J"
        )
    if result.comparison:
        c = result.comparison
        print(
            f"multi vs single: completed {c['completed_mean_multi']:.1f} vs "
            f"{c['completed_mean_single']:.1f} (multi >= single in {c['completed_ge_fraction']:.0%} of pairs)"
        )


def _cmd_run(args) -> int:
    cfg = _load(args)
    out = Path(args.output_dir) if args.output_dir else Path(cfg.output_dir)
    if args.server:
        rows = _remote_post(args.server, "/experiments/run", {"config": cfg.model_dump()})
        out.mkdir(parents=True, exist_ok=True)
        write_csv(out / "runs.csv", RUN_COLUMNS, rows["per_run"])
        write_csv(out / "aggregate.csv", aggregate_columns(), rows["aggregate"])
        if rows.get("comparison"):
            write_csv(out / "comparison.csv", list(rows["comparison"].keys()), [rows["comparison"]])
        print(f"wrote artifacts from {args.server} to {out}")
        return EXIT_OK
    result = run_experiment(cfg, out)
    _print_summary(result)
    print(f"artifacts in {out}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = _load(args)
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--values must be numeric, got {args.values!r}")
    if not values:
        raise ConfigError("--values is empty")
    out = Path(args.output_dir) if args.output_dir else Path(cfg.output_dir)
    if args.server:
        payload = {"config": cfg.model_dump(), "axis": args.axis, "values": values}
        rows = _remote_post(args.server, "/experiments/sweep", payload)["rows"]
        out.mkdir(parents=True, exist_ok=True)
        write_csv(out / f"sweep_{args.axis}.csv", ["axis", "value"] + aggregate_columns(), rows)
    else:
        rows = run_sweep(cfg, args.axis, values, out)
    for row in rows:
        rate = row.get("allocation_rate_mean")
        rate_s = f"{rate:.3f}" if rate is not None else "n/a"
        print(f"{args.axis}={row['value']} [{row['mode']}]: NC={row['nc_mean']:.2f} rate={rate_s}")
    print(f"sweep artifact in {out}")
    return EXIT_OK


def _scenario_dump_dict(cfg: ExperimentConfig, run_number: int) -> dict:
    scenario = build_scenario(cfg.scenario, run_number)
    return {
        "node_count": scenario.node_count,
        "sm": scenario.sm,
        "run_number": scenario.run_number,
        "seed": scenario.seed,
        "capability_seed": scenario.capability_seed,
        "ap": {"x": scenario.ap_pos.x, "y": scenario.ap_pos.y},
        "nodes": [
            {
                "id": n.id,
                "x": n.pos.x,
                "y": n.pos.y,
                "capabilities": capability_names(n.capabilities),
            }
            for n in scenario.nodes
        ],
        "tasks": [
            {
                "id": t.id,
                "required": capability_names(t.required),
                "duration_s": t.duration_s,
                "quorum": t.quorum,
            }
            for t in scenario.tasks
        ],
        "sum_task_duration_s": sum(t.duration_s for t in scenario.tasks),
    }


def _cmd_dump(args) -> int:
    cfg = _load(args)
    if args.server:
        payload = {"scenario": cfg.scenario.model_dump(), "run_number": args.run}
        dump = _remote_post(args.server, "/scenario/dump", payload)
    else:
        dump = _scenario_dump_dict(cfg, args.run)
    text = json.dumps(dump, indent=2)
    if args.output:
        Path(args.output).write_text(text + "\n")
        print(f"scenario written to {args.output}")
    else:
        print(text)
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("capsim.service:app", host=args.host, port=args.port)
    return EXIT_OK


def _remote_post(server: str, endpoint: str, payload: dict) -> dict:
    import httpx

    url = server.rstrip("/") + endpoint
    response = httpx.post(url, json=payload, timeout=600.0)
    if response.status_code == 422:
        raise ConfigError(f"{url}: {response.text}")
    response.raise_for_status()
    return response.json()


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "sweep": _cmd_sweep,
        "dump-scenario": _cmd_dump,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
