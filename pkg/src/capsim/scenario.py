"""Reproducible experiment scenarios: deterministic grid placement, seeded
capability assignment (held fixed across run numbers), and seeded task lists.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, sqrt
from typing import List, Sequence, Tuple

from .capabilities import (
    MANDATORY_TASK_CAPS,
    OPTIONAL_PHYSIOLOGICAL,
    OPTIONAL_STRUCTURAL,
    PHYSIOLOGICAL,
    STRUCTURAL,
    CapabilitySet,
)
from .model import NodeState, Position, Task
from .rng import MinStd


@dataclass
class Scenario:
    """Fully expanded world for one run: placed, capability-assigned nodes,
    the AP at the area center, and the ordered task list."""

    nodes: List[NodeState]
    ap_pos: Position
    tasks: List[Task]
    node_count: int
    sm: int
    run_number: int
    seed: int
    capability_seed: int


def seed_for(node_count: int, run_number: int, sm: int) -> int:
    """Run seed: the sum of object count, run number and simultaneous tasks."""
    if node_count < 0 or run_number < 0 or sm < 0:
        raise ValueError("seed components must be nonnegative")
    return node_count + run_number + sm


def place_nodes(n: int, area: Tuple[float, float]) -> List[Position]:
    """Evenly distribute n nodes on a ceil(sqrt(n))-column grid spanning the
    area, row-major by node id, each at its cell center. Deterministic."""
    if n < 1:
        raise ValueError("need at least one node")
    cols = ceil(sqrt(n))
    rows = ceil(n / cols)
    cell_w = area[0] / cols
    cell_h = area[1] / rows
    out = []
    for i in range(n):
        col = i % cols
        row = i // cols
        out.append(Position((col + 0.5) * cell_w, (row + 0.5) * cell_h))
    return out


def place_nodes_random(n: int, area: Tuple[float, float], rng: MinStd) -> List[Position]:
    """Uniform-random placement alternative, behind a config flag."""
    if n < 1:
        raise ValueError("need at least one node")
    out = []
    for _ in range(n):
        # Raw draws are uniform over [1, 2^31 - 2]; map into the open area.
        x = area[0] * rng.next_raw() / 2_147_483_647
        y = area[1] * rng.next_raw() / 2_147_483_647
        out.append(Position(x, y))
    return out


def assign_capabilities(
    n: int, rng: MinStd, per_class: Tuple[int, int]
) -> List[CapabilitySet]:
    """Per node: k_s structural and k_h physiological capabilities, each count
    uniform over per_class (inclusive), drawn without replacement per class."""
    lo, hi = per_class
    if not 0 <= lo <= hi <= len(STRUCTURAL):
        raise ValueError(f"capabilities per class must satisfy 0 <= lo <= hi <= {len(STRUCTURAL)}")
    sets = []
    for _ in range(n):
        k_s = rng.uniform_int(lo, hi)
        caps = rng.sample(STRUCTURAL, k_s)
        k_h = rng.uniform_int(lo, hi)
        caps += rng.sample(PHYSIOLOGICAL, k_h)
        sets.append(frozenset(caps))
    return sets


def generate_tasks(
    count: int,
    rng: MinStd,
    extra_structural: Tuple[int, int] = (0, 3),
    extra_physiological: Tuple[int, int] = (0, 2),
    durations_s: Sequence[float] = (60.0, 120.0),
    quorum_range: Tuple[int, int] = (2, 5),
) -> List[Task]:
    """Seeded task list. Every task requires the seven mandatory capabilities
    plus uniform extras from the remaining ones of each class; duration and
    quorum are drawn uniformly from their configured sets."""
    if extra_structural[1] > len(OPTIONAL_STRUCTURAL):
        raise ValueError("at most three extra structural capabilities exist")
    if extra_physiological[1] > len(OPTIONAL_PHYSIOLOGICAL):
        raise ValueError("at most two extra physiological capabilities exist")
    tasks = []
    for tid in range(count):
        n_s = rng.uniform_int(*extra_structural)
        extra = rng.sample(OPTIONAL_STRUCTURAL, n_s)
        n_h = rng.uniform_int(*extra_physiological)
        extra += rng.sample(OPTIONAL_PHYSIOLOGICAL, n_h)
        duration = float(rng.choice(list(durations_s)))
        quorum = rng.uniform_int(*quorum_range)
        tasks.append(Task(id=tid, required=MANDATORY_TASK_CAPS | frozenset(extra), duration_s=duration, quorum=quorum))
    return tasks
