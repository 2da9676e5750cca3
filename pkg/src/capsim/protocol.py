"""Node and access-point state machines: warm-up capability dissemination,
cluster formation and leader registration, then the periodic multi-task
dispatch / accept cycle.

Every handler is a transition (state, event) -> (state, emitted messages)
invoked by the engine in timestamp order; nothing here blocks or sleeps.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Deque, Dict, List, Sequence, Set

from .capabilities import capability_names
from .engine import Simulator
from .messages import (
    CapabilityDissemination,
    LeaderRegister,
    LeaderToCluster,
    Message,
    TaskAccept,
    TaskDispatch,
)
from .metrics import MetricsLedger, RoundRecord
from .model import NeighborInfo, NodeId, NodeState, Role, Task, TaskStatus
from .similarity import SimilarityScale, build_cluster_view, select_leader

log = logging.getLogger(__name__)

# A dispatch round that fires while leader registrations are still in flight
# (possible when the first round coincides with warm-up end) retries one hop
# later, a bounded number of times, before skipping to the next round.
MAX_ROUND_DEFERRALS = 3


@dataclass(frozen=True)
class ProtocolTiming:
    """Phase schedule: warm-up broadcasts, dispatch rounds, confirmation."""

    warmup_duration_s: float = 60.0
    warmup_broadcast_period_s: float = 1.0
    first_dispatch_s: float = 60.0
    dispatch_period_s: float = 60.0
    last_dispatch_s: float = 840.0
    confirmation_window_s: float = 1.0
    # Time a leader takes to verify task-vs-cluster compatibility before its
    # accept goes out; part of the observed accept latency.
    leader_check_delay_s: float = 0.02

    def __post_init__(self) -> None:
        for name in (
            "warmup_duration_s",
            "warmup_broadcast_period_s",
            "dispatch_period_s",
            "confirmation_window_s",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.leader_check_delay_s < 0:
            raise ValueError("leader_check_delay_s must be nonnegative")
        if self.first_dispatch_s < self.warmup_duration_s:
            raise ValueError("first dispatch cannot precede warm-up end")
        if self.last_dispatch_s < self.first_dispatch_s:
            raise ValueError("last dispatch cannot precede the first")

    def dispatch_times(self) -> List[float]:
        count = int((self.last_dispatch_s - self.first_dispatch_s) / self.dispatch_period_s + 1e-9)
        return [self.first_dispatch_s + i * self.dispatch_period_s for i in range(count + 1)]


class NodeAgent:
    """Behavior of one IIoT object wired into the engine."""

    def __init__(
        self, state: NodeState, sim: Simulator, timing: ProtocolTiming, scale: SimilarityScale
    ) -> None:
        self.state = state
        self.sim = sim
        self.timing = timing
        self.scale = scale
        self.heard_tasks: List[int] = []  # LeaderToCluster notifications seen

    def start(self) -> None:
        self.sim.schedule(0.0, self._broadcast_tick)
        self.sim.schedule(self.timing.warmup_duration_s, self._finish_warmup)

    def on_message(self, msg: Message, sender: NodeId, now: float) -> None:
        if isinstance(msg, CapabilityDissemination):
            self._recv_capabilities(msg)
        elif isinstance(msg, TaskDispatch):
            # Compatibility check takes a beat before any accept goes out.
            self.sim.schedule(now + self.timing.leader_check_delay_s, self._check_task, msg)
        elif isinstance(msg, LeaderToCluster):
            if msg.leader != self.state.id:
                self.heard_tasks.append(msg.task_id)
        else:
            log.debug("node %d ignoring %s", self.state.id, type(msg).__name__)

    def _broadcast_tick(self) -> None:
        st = self.state
        msg = CapabilityDissemination(st.id, st.capabilities, len(st.neighbor_table))
        self.sim.broadcast(st.id, msg)
        nxt = self.sim.now + self.timing.warmup_broadcast_period_s
        if nxt < self.timing.warmup_duration_s:
            self.sim.schedule(nxt, self._broadcast_tick)

    def _recv_capabilities(self, msg: CapabilityDissemination) -> None:
        st = self.state
        if msg.sender == st.id:
            log.warning("node %d received its own capability broadcast; ignored", st.id)
            return
        st.neighbor_table[msg.sender] = NeighborInfo(msg.caps, msg.neighborhood_size)

    def _finish_warmup(self) -> None:
        st = self.state
        st.cluster_view = build_cluster_view(st, self.scale)
        leader = select_leader(st)
        if self.sim.tracing:
            self.sim.emit(
                {
                    "t": self.sim.now,
                    "kind": "state",
                    "node": st.id,
                    "event": "cluster_formed",
                    "cluster": sorted(st.cluster_view),
                    "leader": leader,
                }
            )
        if leader == st.id:
            st.role = Role.LEADER
            self.sim.send_to_ap(st.id, LeaderRegister(st.id))

    def _check_task(self, msg: TaskDispatch) -> None:
        st = self.state
        if st.role is not Role.LEADER:
            log.warning("node %d received a task dispatch while not a leader", st.id)
            return
        if not (msg.required <= st.capabilities and len(st.cluster_view) >= msg.quorum):
            return  # silent decline; the AP infers it by window expiry
        if self.sim.tracing:
            self.sim.emit(
                {
                    "t": self.sim.now,
                    "kind": "state",
                    "node": st.id,
                    "event": "task_accepted",
                    "task_id": msg.task_id,
                    "required": capability_names(msg.required),
                    "leader_caps": capability_names(st.capabilities),
                    "cluster_size": len(st.cluster_view),
                    "quorum": msg.quorum,
                }
            )
        self.sim.send_to_ap(st.id, TaskAccept(msg.task_id, st.id))
        self.sim.broadcast(
            st.id,
            LeaderToCluster(msg.task_id, msg.required, msg.duration_s, msg.quorum, st.id),
        )


class AccessPoint:
    """Central dispatcher: tracks leaders, dispatches up to sm pending tasks
    per round to every leader, re-queues unconfirmed tasks, times completions.
    """

    def __init__(
        self,
        sim: Simulator,
        tasks: Sequence[Task],
        sm: int,
        timing: ProtocolTiming,
        ledger: MetricsLedger,
    ) -> None:
        if sm < 1:
            raise ValueError("sm must be >= 1")
        self.sim = sim
        self.timing = timing
        self.ledger = ledger
        self.sm = sm
        self.leader_list: Set[NodeId] = set()
        self.pending: Deque[Task] = deque(tasks)
        self.tasks_by_id: Dict[int, Task] = {t.id: t for t in tasks}
        self._round_by_task: Dict[int, RoundRecord] = {}
        self.completed: List[int] = []

    def start(self) -> None:
        for t in self.timing.dispatch_times():
            self.sim.schedule(t, self._dispatch_round, t, 0)

    def on_message(self, msg: Message, sender: NodeId, now: float) -> None:
        if isinstance(msg, LeaderRegister):
            self._register_leader(msg.leader)
        elif isinstance(msg, TaskAccept):
            self._on_accept(msg, now)
        else:
            log.warning("AP ignoring unexpected %s", type(msg).__name__)

    def _register_leader(self, leader: NodeId) -> None:
        if leader in self.leader_list:
            return  # duplicate registration is a no-op
        self.leader_list.add(leader)
        if self.sim.tracing:
            self.sim.emit(
                {
                    "t": self.sim.now,
                    "kind": "state",
                    "node": leader,
                    "event": "leader_registered",
                    "leaders": len(self.leader_list),
                }
            )

    def _dispatch_round(self, scheduled_time: float, deferrals: int) -> None:
        now = self.sim.now
        if not self.pending:
            return  # nothing to dispatch this round
        if not self.leader_list:
            if deferrals < MAX_ROUND_DEFERRALS:
                self.sim.schedule(
                    now + self.sim.channel.hop_delay_s, self._dispatch_round, scheduled_time, deferrals + 1
                )
            else:
                log.warning("dispatch round at %.3fs skipped: no registered leaders", scheduled_time)
            return
        batch: List[Task] = [self.pending.popleft() for _ in range(min(self.sm, len(self.pending)))]
        rec = self.ledger.open_round(now)
        leaders = sorted(self.leader_list)
        for task in batch:
            task.mark_dispatched(now)
            rec.dispatched.append(task.id)
            self._round_by_task[task.id] = rec
            self.sim.ap_send_leaders(
                leaders, TaskDispatch(task.id, task.required, task.duration_s, task.quorum)
            )
        if self.sim.tracing:
            self.sim.emit(
                {
                    "t": now,
                    "kind": "state",
                    "node": None,
                    "event": "round_dispatched",
                    "tasks": [t.id for t in batch],
                    "leaders": len(leaders),
                }
            )
        self.sim.schedule(
            now + self.timing.confirmation_window_s, self._confirm, [t.id for t in batch]
        )

    def _on_accept(self, msg: TaskAccept, now: float) -> None:
        task = self.tasks_by_id.get(msg.task_id)
        if task is None:
            log.warning("accept for unknown task %d", msg.task_id)
            return
        if task.status is not TaskStatus.DISPATCHED:
            # Only reachable when the confirmation window is shorter than the
            # accept path; such accepts are stale and dropped.
            log.warning("late accept for task %d ignored (%s)", msg.task_id, task.status.value)
            return
        first = not task.accepted
        task.record_accept(msg.leader, now)
        self.ledger.record_accept(self._round_by_task[task.id], task.id, msg.leader, now)
        if first:
            self.sim.schedule(now + task.duration_s, self._complete, task)

    def _confirm(self, task_ids: List[int]) -> None:
        # Reverse order keeps the original relative order at the queue head.
        for tid in reversed(task_ids):
            task = self.tasks_by_id[tid]
            if task.status is TaskStatus.DISPATCHED and not task.accepted:
                task.revert_to_pending()
                del self._round_by_task[tid]
                self.pending.appendleft(task)
                if self.sim.tracing:
                    self.sim.emit(
                        {
                            "t": self.sim.now,
                            "kind": "state",
                            "node": None,
                            "event": "task_reverted",
                            "task_id": tid,
                        }
                    )

    def _complete(self, task: Task) -> None:
        task.mark_completed()
        self.completed.append(task.id)
        if self.sim.tracing:
            self.sim.emit(
                {
                    "t": self.sim.now,
                    "kind": "state",
                    "node": None,
                    "event": "task_completed",
                    "task_id": task.id,
                }
            )
