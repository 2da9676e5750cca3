"""capsim: discrete-event simulator for capability-similarity clustering and
multi-task allocation in IIoT health networks."""

__version__ = "0.1.0"

from .capabilities import Capability, CapabilitySet, intersect_card
from .engine import ChannelModel, EngineFault, Simulator
from .metrics import MetricsLedger, RadioModel, RunSummary, aggregate
from .model import NodeState, Position, Role, Task, TaskStatus
from .protocol import AccessPoint, NodeAgent, ProtocolTiming
from .scenario import Scenario, seed_for
from .similarity import SimilarityLevel, SimilarityScale, classify, similarity
from .simulation import RunResult, SimParams, run_simulation

__all__ = [
    "__version__",
    "Capability",
    "CapabilitySet",
    "intersect_card",
    "ChannelModel",
    "EngineFault",
    "Simulator",
    "MetricsLedger",
    "RadioModel",
    "RunSummary",
    "aggregate",
    "NodeState",
    "Position",
    "Role",
    "Task",
    "TaskStatus",
    "AccessPoint",
    "NodeAgent",
    "ProtocolTiming",
    "Scenario",
    "seed_for",
    "SimilarityLevel",
    "SimilarityScale",
    "classify",
    "similarity",
    "RunResult",
    "SimParams",
    "run_simulation",
]
