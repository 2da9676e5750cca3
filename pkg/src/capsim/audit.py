"""Independent re-checks of protocol guarantees from the structured event
stream: accept soundness, radio-energy reconciliation, and latency bounds.

The auditor consumes the same records a trace file would contain and rebuilds
its verdicts purely from them; it never inspects live protocol state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from .engine import ChannelModel
from .metrics import RadioModel
from .protocol import ProtocolTiming


@dataclass
class AuditReport:
    accepts_checked: int = 0
    accept_sends: int = 0
    soundness_violations: List[str] = field(default_factory=list)
    latency_violations: List[str] = field(default_factory=list)
    tx_from_log_j: float = 0.0
    rx_from_log_j: float = 0.0

    @property
    def ec_from_log_j(self) -> float:
        return self.tx_from_log_j + self.rx_from_log_j

    @property
    def ok(self) -> bool:
        return (
            not self.soundness_violations
            and not self.latency_violations
            and self.accepts_checked == self.accept_sends
        )


class TraceAuditor:
    """Event-stream sink that re-derives protocol guarantees.

    Soundness: every task_accept send must follow a task_accepted state record
    whose own fields satisfy required-subset and quorum. Latency: each accept
    must reach the AP within [hop_delay, confirmation_window] of the task's
    dispatch. Energy: tx/rx recomputed from send/recv records.
    """

    def __init__(self, radio: RadioModel, channel: ChannelModel, timing: ProtocolTiming) -> None:
        self.radio = radio
        self.channel = channel
        self.timing = timing
        self.report = AuditReport()
        self._pending_accepts: Dict[Tuple[int, int], dict] = {}
        self._dispatch_time: Dict[int, float] = {}

    def __call__(self, record: dict) -> None:
        kind = record["kind"]
        if kind == "send":
            self.report.tx_from_log_j += self.radio.tx_energy_j(record["bits"], record["d"])
            msg = record["msg"]
            if msg == "task_dispatch":
                self._dispatch_time[record["task_id"]] = record["t"]
            elif msg == "task_accept":
                self._check_accept(record)
        elif kind == "recv":
            self.report.rx_from_log_j += self.radio.rx_energy_j(record["bits"])
        elif kind == "state" and record["event"] == "task_accepted":
            self._pending_accepts[(record["node"], record["task_id"])] = record

    def _check_accept(self, record: dict) -> None:
        rep = self.report
        rep.accept_sends += 1
        key = (record["node"], record["task_id"])
        state = self._pending_accepts.pop(key, None)
        if state is None:
            rep.soundness_violations.append(
                f"t={record['t']}: accept from node {record['node']} for task "
                f"{record['task_id']} without a matching acceptance record"
            )
            return
        rep.accepts_checked += 1
        required = set(state["required"])
        caps = set(state["leader_caps"])
        if not required <= caps:
            rep.soundness_violations.append(
                f"t={record['t']}: node {record['node']} accepted task {record['task_id']} "
                f"missing capabilities {sorted(required - caps)}"
            )
        if state["cluster_size"] < state["quorum"]:
            rep.soundness_violations.append(
                f"t={record['t']}: node {record['node']} accepted task {record['task_id']} "
                f"with cluster {state['cluster_size']} below quorum {state['quorum']}"
            )
        dispatched_at = self._dispatch_time.get(record["task_id"])
        if dispatched_at is None:
            rep.latency_violations.append(
                f"t={record['t']}: accept for task {record['task_id']} never dispatched"
            )
            return
        # Arrival at the AP is one hop after the accept send.
        lat = record["t"] + self.channel.hop_delay_s - dispatched_at
        if not (self.channel.hop_delay_s <= lat <= self.timing.confirmation_window_s):
            rep.latency_violations.append(
                f"t={record['t']}: accept latency {lat:.6f}s for task {record['task_id']} "
                f"outside [{self.channel.hop_delay_s}, {self.timing.confirmation_window_s}]"
            )
