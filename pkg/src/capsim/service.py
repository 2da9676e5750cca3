"""HTTP facade over the simulator: run experiments, sweep parameters, expand
scenarios and score capability similarity from any HTTP client.

Responses carry the same rows the CLI writes as CSV; tracing is a local-file
concern and is rejected here.
"""

from __future__ import annotations

from typing import Dict, List, Literal, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .capabilities import capability_names, parse_capability_set
from .config import (
    ConfigError,
    ExperimentConfig,
    ScaleConfig,
    ScenarioConfig,
    build_scenario,
)
from .experiment import execute_experiment, run_sweep
from .similarity import classify, similarity

app = FastAPI(
    title="capsim",
    version=__version__,
    description="Capability-similarity clustering and multi-task allocation simulator",
)


class HealthResponse(BaseModel):
    status: Literal["ok"] = "ok"
    version: str = __version__


class SimilarityRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    a: List[str] = Field(min_length=1)
    b: List[str] = Field(min_length=1)
    scale: ScaleConfig = ScaleConfig()


class SimilarityResponse(BaseModel):
    score: float
    level: str


class ScenarioDumpRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: ScenarioConfig = ScenarioConfig()
    run_number: int = Field(1, ge=0)


class NodeDump(BaseModel):
    id: int
    x: float
    y: float
    capabilities: List[str]


class TaskDump(BaseModel):
    id: int
    required: List[str]
    duration_s: float
    quorum: int


class ScenarioDumpResponse(BaseModel):
    node_count: int
    sm: int
    run_number: int
    seed: int
    capability_seed: int
    ap: Dict[str, float]
    nodes: List[NodeDump]
    tasks: List[TaskDump]
    sum_task_duration_s: float


class ExperimentRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: ExperimentConfig = ExperimentConfig()


class ExperimentResponse(BaseModel):
    per_run: List[dict]
    aggregate: List[dict]
    comparison: Optional[dict] = None


class SweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: ExperimentConfig = ExperimentConfig()
    axis: Literal["node_count", "sm", "threshold", "range"]
    values: List[float] = Field(min_length=1)


class SweepResponse(BaseModel):
    rows: List[dict]


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse()


@app.post("/similarity", response_model=SimilarityResponse)
def similarity_endpoint(req: SimilarityRequest) -> SimilarityResponse:
    try:
        a = parse_capability_set(req.a)
        b = parse_capability_set(req.b)
        score = similarity(a, b)
        level = classify(score, req.scale.to_scale())
    except (ValueError, ConfigError) as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return SimilarityResponse(score=score, level=level.value)


@app.post("/scenario/dump", response_model=ScenarioDumpResponse)
def scenario_dump(req: ScenarioDumpRequest) -> ScenarioDumpResponse:
    scenario = build_scenario(req.scenario, req.run_number)
    return ScenarioDumpResponse(
        node_count=scenario.node_count,
        sm=scenario.sm,
        run_number=scenario.run_number,
        seed=scenario.seed,
        capability_seed=scenario.capability_seed,
        ap={"x": scenario.ap_pos.x, "y": scenario.ap_pos.y},
        nodes=[
            NodeDump(id=n.id, x=n.pos.x, y=n.pos.y, capabilities=capability_names(n.capabilities))
            for n in scenario.nodes
        ],
        tasks=[
            TaskDump(
                id=t.id,
                required=capability_names(t.required),
                duration_s=t.duration_s,
                quorum=t.quorum,
            )
            for t in scenario.tasks
        ],
        sum_task_duration_s=sum(t.duration_s for t in scenario.tasks),
    )


@app.post("/experiments/run", response_model=ExperimentResponse)
def experiments_run(req: ExperimentRequest) -> ExperimentResponse:
    if req.config.trace:
        raise HTTPException(
            status_code=422,
            detail="tracing writes local files; run traced experiments through the CLI",
        )
    result = execute_experiment(req.config)
    return ExperimentResponse(
        per_run=result.per_run,
        aggregate=result.aggregate_rows,
        comparison=result.comparison,
    )


@app.post("/experiments/sweep", response_model=SweepResponse)
def experiments_sweep(req: SweepRequest) -> SweepResponse:
    if req.config.trace:
        raise HTTPException(status_code=422, detail="tracing is not available over HTTP")
    try:
        rows = run_sweep(req.config, req.axis, req.values)
    except ConfigError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return SweepResponse(rows=rows)
