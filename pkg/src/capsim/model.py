"""Domain state: node identity and placement, roles, and the task lifecycle."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, NamedTuple, Optional, Set, Tuple

from .capabilities import CapabilitySet

NodeId = int

# Trace/ledger identity of the access point; real nodes use ids >= 0.
AP_ID: NodeId = -1


@dataclass(frozen=True)
class Position:
    x: float
    y: float

    def distance_to(self, other: "Position") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


class Role(Enum):
    COMMON = "common"
    LEADER = "leader"


class NeighborInfo(NamedTuple):
    """What a node knows about a neighbor from its last capability broadcast."""

    caps: CapabilitySet
    neighborhood_size: int


@dataclass
class NodeState:
    """One IIoT object: identity, placement, capabilities and cluster view."""

    id: NodeId
    pos: Position
    capabilities: CapabilitySet
    role: Role = Role.COMMON
    neighbor_table: Dict[NodeId, NeighborInfo] = field(default_factory=dict)
    cluster_view: Set[NodeId] = field(default_factory=set)


class TaskStatus(Enum):
    PENDING = "pending"
    DISPATCHED = "dispatched"
    COMPLETED = "completed"


@dataclass
class Task:
    """Sensing task tuple: id, required capability set, duration, quorum.

    Lifecycle: pending -> dispatched -> completed; a dispatched task that no
    cluster accepted reverts to pending for a later round.
    """

    id: int
    required: CapabilitySet
    duration_s: float
    quorum: int
    status: TaskStatus = TaskStatus.PENDING
    dispatch_time_s: Optional[float] = None
    accept_times_s: List[Tuple[NodeId, float]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.required:
            raise ValueError(f"task {self.id}: required capability set is empty")
        if self.quorum < 1:
            raise ValueError(f"task {self.id}: quorum must be >= 1")
        if self.duration_s <= 0:
            raise ValueError(f"task {self.id}: duration must be positive")

    def mark_dispatched(self, now: float) -> None:
        if self.status is not TaskStatus.PENDING:
            raise ValueError(f"task {self.id}: cannot dispatch from {self.status}")
        self.status = TaskStatus.DISPATCHED
        self.dispatch_time_s = now

    def revert_to_pending(self) -> None:
        if self.status is not TaskStatus.DISPATCHED:
            raise ValueError(f"task {self.id}: cannot revert from {self.status}")
        self.status = TaskStatus.PENDING
        self.dispatch_time_s = None

    def mark_completed(self) -> None:
        if self.status is not TaskStatus.DISPATCHED:
            raise ValueError(f"task {self.id}: cannot complete from {self.status}")
        self.status = TaskStatus.COMPLETED

    def record_accept(self, leader: NodeId, now: float) -> None:
        self.accept_times_s.append((leader, now))

    @property
    def accepted(self) -> bool:
        return bool(self.accept_times_s)

    @property
    def first_accept_time_s(self) -> Optional[float]:
        return self.accept_times_s[0][1] if self.accept_times_s else None
