"""Experiment configuration schema and YAML loading.

The same pydantic models validate config files for the CLI and request
bodies for the HTTP service, and convert into the core runtime types.
"""

from __future__ import annotations

from pathlib import Path
from typing import List, Literal, Tuple

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .engine import ChannelModel
from .messages import MessageSizes
from .metrics import RadioModel
from .protocol import ProtocolTiming
from .rng import MinStd
from .scenario import (
    Scenario,
    assign_capabilities,
    generate_tasks,
    place_nodes,
    place_nodes_random,
    seed_for,
)
from .similarity import SimilarityScale
from .simulation import SimParams
from .model import NodeState, Position

MULTI_TASK = "multi_task"
SINGLE_TASK = "single_task"
Mode = Literal["multi_task", "single_task"]


class ConfigError(Exception):
    """Invalid configuration document; message carries location details."""


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


class RoundSchedule(_Model):
    first_dispatch_s: float = Field(60.0, gt=0)
    period_s: float = Field(60.0, gt=0)
    last_dispatch_s: float = Field(840.0, gt=0)

    @model_validator(mode="after")
    def _ordered(self) -> "RoundSchedule":
        if self.last_dispatch_s < self.first_dispatch_s:
            raise ValueError("last_dispatch_s must be >= first_dispatch_s")
        return self

    def round_count(self) -> int:
        return int((self.last_dispatch_s - self.first_dispatch_s) / self.period_s + 1e-9) + 1


class ScaleConfig(_Model):
    neutral_lo: float = Field(0.5, ge=0.0, le=1.0)
    similar_lo: float = Field(0.9, ge=0.0, le=1.0)
    join_threshold: float = Field(0.8, ge=0.0, le=1.0)

    def to_scale(self) -> SimilarityScale:
        try:
            return SimilarityScale(self.neutral_lo, self.similar_lo, self.join_threshold)
        except ValueError as exc:
            raise ConfigError(f"scale: {exc}") from exc


class ChannelConfig(_Model):
    hop_delay_s: float = Field(0.002, gt=0)
    node_range_m: float = Field(40.0, gt=0)
    ap_reaches_all: bool = True

    def to_channel(self) -> ChannelModel:
        return ChannelModel(self.hop_delay_s, self.node_range_m, self.ap_reaches_all)


class ScenarioConfig(_Model):
    """One evaluation scenario: who is placed where, with which capabilities,
    and which task stream the AP dispatches."""

    node_count: int = Field(50, ge=1)
    area_m: Tuple[float, float] = (200.0, 200.0)
    sm: int = Field(2, ge=1)
    placement: Literal["grid", "uniform_random"] = "grid"
    rng_kind: Literal["minstd"] = "minstd"
    # Per-class capability counts are drawn uniformly from this inclusive
    # range. Rich sets keep leader elections meaningful: below [5,6] the
    # fixed per-config capability draw often leaves every elected leader
    # missing a mandatory capability and allocation collapses.
    caps_per_class: Tuple[int, int] = (5, 6)
    task_extra_structural: Tuple[int, int] = (0, 3)
    task_extra_physiological: Tuple[int, int] = (0, 2)
    durations_s: List[float] = [60.0, 120.0]
    quorum_range: Tuple[int, int] = (2, 5)
    rounds: RoundSchedule = RoundSchedule()
    scale: ScaleConfig = ScaleConfig()
    channel: ChannelConfig = ChannelConfig()

    @model_validator(mode="after")
    def _ranges(self) -> "ScenarioConfig":
        for name in ("caps_per_class", "task_extra_structural", "task_extra_physiological", "quorum_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name}: lower bound {lo} exceeds upper bound {hi}")
        if self.caps_per_class[0] < 1:
            raise ValueError("caps_per_class lower bound must be >= 1")
        if self.caps_per_class[1] > 6:
            raise ValueError("caps_per_class upper bound cannot exceed the 6 per class")
        if self.quorum_range[0] < 1:
            raise ValueError("quorum must be >= 1")
        if not self.durations_s or any(d <= 0 for d in self.durations_s):
            raise ValueError("durations_s must be positive and nonempty")
        if self.area_m[0] <= 0 or self.area_m[1] <= 0:
            raise ValueError("area dimensions must be positive")
        return self

    @property
    def demand(self) -> str:
        return {2: "A", 4: "B"}.get(self.sm, f"sm{self.sm}")

    def task_count(self) -> int:
        return self.rounds.round_count() * self.sm

    def capability_seed(self) -> int:
        # Run-independent: capabilities stay fixed across run numbers.
        return self.node_count + self.sm


class ProtocolSection(_Model):
    warmup_duration_s: float = Field(60.0, gt=0)
    warmup_broadcast_period_s: float = Field(1.0, gt=0)
    confirmation_window_s: float = Field(1.0, gt=0)
    leader_check_delay_s: float = Field(0.02, ge=0)


class RadioConfig(_Model):
    e_elec_j_per_bit: float = Field(50e-9, gt=0)
    eps_amp_j_per_bit_m2: float = Field(100e-12, gt=0)

    def to_radio(self) -> RadioModel:
        return RadioModel(self.e_elec_j_per_bit, self.eps_amp_j_per_bit_m2)


class MessageBits(_Model):
    capability_dissemination: int = Field(256, gt=0)
    leader_register: int = Field(64, gt=0)
    task_dispatch: int = Field(256, gt=0)
    task_accept: int = Field(96, gt=0)
    leader_to_cluster: int = Field(256, gt=0)

    def to_sizes(self) -> MessageSizes:
        return MessageSizes(**self.model_dump())


class ExperimentConfig(_Model):
    """Top-level config document: scenario, runtime knobs, and run plan."""

    scenario: ScenarioConfig = ScenarioConfig()
    protocol: ProtocolSection = ProtocolSection()
    radio: RadioConfig = RadioConfig()
    message_bits: MessageBits = MessageBits()
    run_until_s: float = Field(900.0, gt=0)
    runs: int = Field(35, ge=1)
    modes: List[Mode] = [MULTI_TASK, SINGLE_TASK]
    output_dir: str = "results"
    trace: bool = False
    workers: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _check(self) -> "ExperimentConfig":
        if not self.modes:
            raise ValueError("modes must be nonempty")
        if len(set(self.modes)) != len(self.modes):
            raise ValueError("modes must be distinct")
        if self.scenario.rounds.first_dispatch_s < self.protocol.warmup_duration_s:
            raise ValueError("first dispatch cannot precede warm-up end")
        return self

    def to_timing(self) -> ProtocolTiming:
        return ProtocolTiming(
            warmup_duration_s=self.protocol.warmup_duration_s,
            warmup_broadcast_period_s=self.protocol.warmup_broadcast_period_s,
            first_dispatch_s=self.scenario.rounds.first_dispatch_s,
            dispatch_period_s=self.scenario.rounds.period_s,
            last_dispatch_s=self.scenario.rounds.last_dispatch_s,
            confirmation_window_s=self.protocol.confirmation_window_s,
            leader_check_delay_s=self.protocol.leader_check_delay_s,
        )

    def to_sim_params(self) -> SimParams:
        return SimParams(
            timing=self.to_timing(),
            scale=self.scenario.scale.to_scale(),
            channel=self.scenario.channel.to_channel(),
            radio=self.radio.to_radio(),
            sizes=self.message_bits.to_sizes(),
            until_s=self.run_until_s,
        )

    def dispatch_sm(self, mode: str) -> int:
        if mode == SINGLE_TASK:
            return 1
        return self.scenario.sm


def build_scenario(cfg: ScenarioConfig, run_number: int) -> Scenario:
    """Expand a scenario config for one run number.

    Placement and capabilities use the run-independent seed so they are
    identical across runs; the task stream uses the per-run seed.
    """
    cap_seed = cfg.capability_seed()
    cap_rng = MinStd(cap_seed)
    if cfg.placement == "grid":
        positions = place_nodes(cfg.node_count, cfg.area_m)
    else:
        positions = place_nodes_random(cfg.node_count, cfg.area_m, MinStd(cap_seed))
    caps = assign_capabilities(cfg.node_count, cap_rng, cfg.caps_per_class)
    nodes = [NodeState(id=i, pos=positions[i], capabilities=caps[i]) for i in range(cfg.node_count)]

    run_seed = seed_for(cfg.node_count, run_number, cfg.sm)
    tasks = generate_tasks(
        cfg.task_count(),
        MinStd(run_seed),
        extra_structural=cfg.task_extra_structural,
        extra_physiological=cfg.task_extra_physiological,
        durations_s=cfg.durations_s,
        quorum_range=cfg.quorum_range,
    )
    return Scenario(
        nodes=nodes,
        ap_pos=Position(cfg.area_m[0] / 2.0, cfg.area_m[1] / 2.0),
        tasks=tasks,
        node_count=cfg.node_count,
        sm=cfg.sm,
        run_number=run_number,
        seed=run_seed,
        capability_seed=cap_seed,
    )


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse and validate a YAML/JSON config file.

    Diagnostics reference the offending line: YAML syntax errors via the
    parser mark, field errors by walking the document node tree.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{path}:{mark.line + 1}" if mark is not None else str(path)
        raise ConfigError(f"{where}: invalid YAML: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        root = yaml.compose(text)
        lines = []
        for err in exc.errors():
            loc = ".".join(str(p) for p in err["loc"]) or "<root>"
            line = _line_for_loc(root, err["loc"])
            where = f"{path}:{line}" if line is not None else str(path)
            lines.append(f"  {where}: {loc}: {err['msg']}")
        raise ConfigError("invalid configuration:\n" + "\n".join(lines)) from exc


def _line_for_loc(node, loc) -> int | None:
    """Deepest YAML source line reachable along a pydantic error location."""
    if node is None:
        return None
    line = node.start_mark.line + 1
    for part in loc:
        if isinstance(node, yaml.MappingNode):
            match = next(
                ((k, v) for k, v in node.value if str(k.value) == str(part)), None
            )
            if match is None:
                break
            key_node, node = match
            line = key_node.start_mark.line + 1
        elif isinstance(node, yaml.SequenceNode) and isinstance(part, int):
            if not 0 <= part < len(node.value):
                break
            node = node.value[part]
            line = node.start_mark.line + 1
        else:
            break
    return line


def validate_config(data: dict, source: str = "<config>") -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        lines = []
        for err in exc.errors():
            loc = ".".join(str(p) for p in err["loc"]) or "<root>"
            lines.append(f"  {loc}: {err['msg']}")
        raise ConfigError(f"{source}: invalid configuration:\n" + "\n".join(lines)) from exc
