"""The five protocol wire messages and their fixed per-variant sizes.

Sizes feed the radio energy accounting; the defaults assume a 32-bit id, a
12-bit capability mask and framing headers, rounded up. All are overridable
in the scenario config.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .capabilities import CapabilitySet, capability_names, parse_capability_set
from .model import NodeId


@dataclass(frozen=True)
class CapabilityDissemination:
    sender: NodeId
    caps: CapabilitySet
    neighborhood_size: int


@dataclass(frozen=True)
class LeaderRegister:
    leader: NodeId


@dataclass(frozen=True)
class TaskDispatch:
    task_id: int
    required: CapabilitySet
    duration_s: float
    quorum: int


@dataclass(frozen=True)
class TaskAccept:
    task_id: int
    leader: NodeId


@dataclass(frozen=True)
class LeaderToCluster:
    task_id: int
    required: CapabilitySet
    duration_s: float
    quorum: int
    leader: NodeId


Message = Union[
    CapabilityDissemination, LeaderRegister, TaskDispatch, TaskAccept, LeaderToCluster
]

WIRE_NAMES = {
    CapabilityDissemination: "capability_dissemination",
    LeaderRegister: "leader_register",
    TaskDispatch: "task_dispatch",
    TaskAccept: "task_accept",
    LeaderToCluster: "leader_to_cluster",
}


@dataclass(frozen=True)
class MessageSizes:
    """Fixed wire size in bits per message variant."""

    capability_dissemination: int = 256
    leader_register: int = 64
    task_dispatch: int = 256
    task_accept: int = 96
    leader_to_cluster: int = 256

    def __post_init__(self) -> None:
        for name in WIRE_NAMES.values():
            if getattr(self, name) <= 0:
                raise ValueError(f"message size {name} must be positive")

    def bits_for(self, msg: Message) -> int:
        return getattr(self, WIRE_NAMES[type(msg)])


def message_to_dict(msg: Message) -> dict:
    """Serialize a message to a plain dict (capability sets as name lists)."""
    if isinstance(msg, CapabilityDissemination):
        return {
            "kind": "capability_dissemination",
            "sender": msg.sender,
            "caps": capability_names(msg.caps),
            "neighborhood_size": msg.neighborhood_size,
        }
    if isinstance(msg, LeaderRegister):
        return {"kind": "leader_register", "leader": msg.leader}
    if isinstance(msg, TaskDispatch):
        return {
            "kind": "task_dispatch",
            "task_id": msg.task_id,
            "required": capability_names(msg.required),
            "duration_s": msg.duration_s,
            "quorum": msg.quorum,
        }
    if isinstance(msg, TaskAccept):
        return {"kind": "task_accept", "task_id": msg.task_id, "leader": msg.leader}
    if isinstance(msg, LeaderToCluster):
        return {
            "kind": "leader_to_cluster",
            "task_id": msg.task_id,
            "required": capability_names(msg.required),
            "duration_s": msg.duration_s,
            "quorum": msg.quorum,
            "leader": msg.leader,
        }
    raise TypeError(f"not a protocol message: {msg!r}")


def message_from_dict(data: dict) -> Message:
    kind = data.get("kind")
    if kind == "capability_dissemination":
        return CapabilityDissemination(
            sender=data["sender"],
            caps=parse_capability_set(data["caps"]),
            neighborhood_size=data["neighborhood_size"],
        )
    if kind == "leader_register":
        return LeaderRegister(leader=data["leader"])
    if kind == "task_dispatch":
        return TaskDispatch(
            task_id=data["task_id"],
            required=parse_capability_set(data["required"]),
            duration_s=data["duration_s"],
            quorum=data["quorum"],
        )
    if kind == "task_accept":
        return TaskAccept(task_id=data["task_id"], leader=data["leader"])
    if kind == "leader_to_cluster":
        return LeaderToCluster(
            task_id=data["task_id"],
            required=parse_capability_set(data["required"]),
            duration_s=data["duration_s"],
            quorum=data["quorum"],
            leader=data["leader"],
        )
    raise ValueError(f"unknown message kind: {kind!r}")
