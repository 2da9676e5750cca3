"""Deterministic discrete-event core: virtual clock, totally ordered event
queue, and a radio-range-aware reliable channel with fixed per-hop latency.

Events are ordered by (time, insertion sequence), so replaying the same
scenario yields a bit-identical event stream. One engine instance is strictly
single-threaded; run independent instances for parallelism.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Dict, List, Sequence, Tuple

from .messages import Message, MessageSizes, WIRE_NAMES, message_to_dict
from .metrics import MetricsLedger
from .model import AP_ID, NodeId, Position

TraceSink = Callable[[dict], None]
Receiver = Callable[[Message, NodeId, float], None]


class EngineFault(RuntimeError):
    """Programming error in simulation wiring (past event, unknown target)."""


@dataclass(frozen=True)
class ChannelModel:
    """Reliable shared channel: fixed per-hop delay, symmetric node range,
    and an AP link that reaches every object."""

    hop_delay_s: float = 0.002
    node_range_m: float = 40.0
    ap_reaches_all: bool = True

    def __post_init__(self) -> None:
        if self.hop_delay_s <= 0:
            raise ValueError("hop_delay_s must be positive")
        if self.node_range_m <= 0:
            raise ValueError("node_range_m must be positive")


class Simulator:
    """Event loop plus channel. Protocol agents register a receiver per node
    id (AP under AP_ID) and interact only through schedule() and the
    transmit helpers."""

    def __init__(
        self,
        channel: ChannelModel,
        positions: Dict[NodeId, Position],
        ap_pos: Position,
        sizes: MessageSizes,
        ledger: MetricsLedger,
    ) -> None:
        self.channel = channel
        self.positions = positions
        self.ap_pos = ap_pos
        self.sizes = sizes
        self.ledger = ledger
        self.now = 0.0
        self._heap: List[Tuple[float, int, Callable, tuple]] = []
        self._seq = 0
        self._receivers: Dict[NodeId, Receiver] = {}
        self._sinks: List[TraceSink] = []
        # Static topology: in-range neighbor ids, sorted, and AP distances.
        self.neighbors: Dict[NodeId, Tuple[NodeId, ...]] = {}
        self.ap_distance: Dict[NodeId, float] = {}
        ids = sorted(positions)
        for nid in ids:
            pos = positions[nid]
            self.neighbors[nid] = tuple(
                other
                for other in ids
                if other != nid and pos.distance_to(positions[other]) <= channel.node_range_m
            )
            self.ap_distance[nid] = pos.distance_to(ap_pos)

    # -- wiring ---------------------------------------------------------

    def register(self, target: NodeId, receiver: Receiver) -> None:
        self._receivers[target] = receiver

    def add_sink(self, sink: TraceSink) -> None:
        self._sinks.append(sink)

    @property
    def tracing(self) -> bool:
        return bool(self._sinks)

    def emit(self, record: dict) -> None:
        for sink in self._sinks:
            sink(record)

    # -- event queue ----------------------------------------------------

    def schedule(self, time_s: float, fn: Callable, *args) -> None:
        """Enqueue fn(*args) at time_s; equal timestamps run in insertion
        order. Scheduling into the past is a fault."""
        if time_s < self.now:
            raise EngineFault(f"event scheduled at {time_s} before now={self.now}")
        heapq.heappush(self._heap, (time_s, self._seq, fn, args))
        self._seq += 1

    def run(self, until_s: float) -> None:
        """Process events in (time, seq) order until the queue drains or the
        next event lies beyond until_s."""
        heap = self._heap
        while heap and heap[0][0] <= until_s:
            time_s, _, fn, args = heapq.heappop(heap)
            self.now = time_s
            fn(*args)

    def pending_events(self) -> int:
        return len(self._heap)

    # -- channel --------------------------------------------------------

    def broadcast(self, sender: NodeId, msg: Message) -> None:
        """Deliver one copy to every node within range of the sender. The
        transmit amplifier is charged for the full node range."""
        dests = self.neighbors[sender]
        self._send(sender, msg, dests, self.channel.node_range_m, "broadcast")

    def unicast(self, sender: NodeId, dst: NodeId, msg: Message) -> None:
        """Node-to-node unicast; out-of-range destinations hear nothing."""
        if dst not in self.positions:
            raise EngineFault(f"unicast to unknown node {dst}")
        dist = self.positions[sender].distance_to(self.positions[dst])
        dests: Tuple[NodeId, ...] = (dst,) if dist <= self.channel.node_range_m else ()
        self._send(sender, msg, dests, dist, dst)

    def send_to_ap(self, sender: NodeId, msg: Message) -> None:
        self._send(sender, msg, (AP_ID,), self.ap_distance[sender], "ap")

    def ap_send(self, dst: NodeId, msg: Message) -> None:
        if dst not in self.positions:
            raise EngineFault(f"AP send to unknown node {dst}")
        dist = self.ap_distance[dst]
        if not self.channel.ap_reaches_all and dist > self.channel.node_range_m:
            dests: Tuple[NodeId, ...] = ()
        else:
            dests = (dst,)
        self._send(AP_ID, msg, dests, dist, dst)

    def ap_send_leaders(self, leaders: Sequence[NodeId], msg: Message) -> None:
        """One copy per listed leader, charged per link."""
        for leader in sorted(leaders):
            self.ap_send(leader, msg)

    def _send(
        self,
        sender: NodeId,
        msg: Message,
        dests: Tuple[NodeId, ...],
        tx_distance: float,
        to_label,
    ) -> None:
        bits = self.sizes.bits_for(msg)
        self.ledger.record_tx(sender, bits, tx_distance)
        if self._sinks:
            payload = message_to_dict(msg)
            record = {
                "t": self.now,
                "kind": "send",
                "node": sender,
                "msg": payload.pop("kind"),
                "to": to_label,
                "bits": bits,
                "d": tx_distance,
                "copies": len(dests),
            }
            record.update(payload)
            self.emit(record)
        if dests:
            self.schedule(self.now + self.channel.hop_delay_s, self._deliver, sender, msg, dests)

    def _deliver(self, sender: NodeId, msg: Message, dests: Tuple[NodeId, ...]) -> None:
        bits = self.sizes.bits_for(msg)
        kind = WIRE_NAMES[type(msg)]
        trace = bool(self._sinks)
        for dst in dests:
            self.ledger.record_rx(dst, bits)
            if trace:
                self.emit(
                    {
                        "t": self.now,
                        "kind": "recv",
                        "node": dst,
                        "from": sender,
                        "bits": bits,
                        "msg": kind,
                    }
                )
            receiver = self._receivers.get(dst)
            if receiver is None:
                raise EngineFault(f"no receiver registered for {dst}")
            receiver(msg, sender, self.now)
