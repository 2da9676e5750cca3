"""Sensing-capability vocabulary shared by objects and tasks.

The universe is closed: six structural (building environment) and six
physiological (patient vitals) sensing functions. Capability sets are plain
frozensets over this universe.
"""

from __future__ import annotations

from enum import Enum
from typing import FrozenSet, Iterable, List


class Capability(Enum):
    """One sensing function an IIoT object can perform."""

    # structural
    TEMPERATURE = "temperature"
    HUMIDITY = "humidity"
    PRESENCE = "presence"
    LIGHT = "light"
    POSITION = "position"
    EQUIPMENT_CONDITION = "equipment_condition"
    # physiological
    HEARTBEAT = "heartbeat"
    BLOOD_PRESSURE = "blood_pressure"
    BODY_TEMPERATURE = "body_temperature"
    OXYGENATION = "oxygenation"
    GLUCOSE = "glucose"
    ECG = "ecg"

    @property
    def is_structural(self) -> bool:
        return self in STRUCTURAL

    @property
    def is_physiological(self) -> bool:
        return self in PHYSIOLOGICAL


CapabilitySet = FrozenSet[Capability]

STRUCTURAL = (
    Capability.TEMPERATURE,
    Capability.HUMIDITY,
    Capability.PRESENCE,
    Capability.LIGHT,
    Capability.POSITION,
    Capability.EQUIPMENT_CONDITION,
)

PHYSIOLOGICAL = (
    Capability.HEARTBEAT,
    Capability.BLOOD_PRESSURE,
    Capability.BODY_TEMPERATURE,
    Capability.OXYGENATION,
    Capability.GLUCOSE,
    Capability.ECG,
)

# Stable ordering used everywhere a capability set is serialized or iterated,
# so output never depends on hash order.
CAPABILITY_ORDER = {cap: i for i, cap in enumerate(Capability)}

# Core every task requires, before random extras are added.
MANDATORY_TASK_CAPS: CapabilitySet = frozenset(
    {
        Capability.TEMPERATURE,
        Capability.HUMIDITY,
        Capability.PRESENCE,
        Capability.HEARTBEAT,
        Capability.BLOOD_PRESSURE,
        Capability.BODY_TEMPERATURE,
        Capability.OXYGENATION,
    }
)

OPTIONAL_STRUCTURAL = tuple(c for c in STRUCTURAL if c not in MANDATORY_TASK_CAPS)
OPTIONAL_PHYSIOLOGICAL = tuple(c for c in PHYSIOLOGICAL if c not in MANDATORY_TASK_CAPS)


def intersect_card(a: CapabilitySet, b: CapabilitySet) -> int:
    """Cardinality of the intersection of two capability sets."""
    return len(a & b)


def sorted_caps(caps: Iterable[Capability]) -> List[Capability]:
    return sorted(caps, key=CAPABILITY_ORDER.__getitem__)


def capability_names(caps: Iterable[Capability]) -> List[str]:
    """Serialize a capability set as a deterministically ordered name list."""
    return [c.value for c in sorted_caps(caps)]


def parse_capability(name: str) -> Capability:
    try:
        return Capability(name)
    except ValueError:
        known = ", ".join(c.value for c in Capability)
        raise ValueError(f"unknown capability {name!r}; known: {known}") from None


def parse_capability_set(names: Iterable[str]) -> CapabilitySet:
    return frozenset(parse_capability(n) for n in names)
