"""Evaluation metrics: allocation counters, per-round cluster aptness and
accept latency, first-order radio energy accounting, and multi-run
aggregation with Student-t confidence intervals.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .model import AP_ID, NodeId


@dataclass(frozen=True)
class RadioModel:
    """First-order radio energy model.

    Transmit: E_elec * k + eps_amp * k * d^2; receive: E_elec * k, with k in
    bits and d in meters.
    """

    e_elec_j_per_bit: float = 50e-9
    eps_amp_j_per_bit_m2: float = 100e-12

    def __post_init__(self) -> None:
        if self.e_elec_j_per_bit <= 0 or self.eps_amp_j_per_bit_m2 <= 0:
            raise ValueError("radio constants must be positive")

    def tx_energy_j(self, size_bits: int, distance_m: float) -> float:
        return (
            self.e_elec_j_per_bit * size_bits
            + self.eps_amp_j_per_bit_m2 * size_bits * distance_m * distance_m
        )

    def rx_energy_j(self, size_bits: int) -> float:
        return self.e_elec_j_per_bit * size_bits


@dataclass
class RoundRecord:
    """One dispatch round: when it fired, what it sent, who accepted."""

    time_s: float
    dispatched: List[int] = field(default_factory=list)
    accepts: List[Tuple[int, NodeId, float]] = field(default_factory=list)  # (task, leader, t)

    def accepting_leaders(self) -> List[NodeId]:
        return sorted({leader for _, leader, _ in self.accepts})

    def accept_times(self) -> List[float]:
        return [t for _, _, t in self.accepts]


class MetricsLedger:
    """Per-run counters: radio energy per node and the dispatch-round log."""

    def __init__(self, radio: RadioModel) -> None:
        self.radio = radio
        self.tx_j: Dict[NodeId, float] = {}
        self.rx_j: Dict[NodeId, float] = {}
        self.rounds: List[RoundRecord] = []
        self.sends = 0
        self.deliveries = 0

    def record_tx(self, node: NodeId, size_bits: int, distance_m: float) -> None:
        if distance_m < 0:
            raise ValueError("distance must be nonnegative")
        self.tx_j[node] = self.tx_j.get(node, 0.0) + self.radio.tx_energy_j(size_bits, distance_m)
        self.sends += 1

    def record_rx(self, node: NodeId, size_bits: int) -> None:
        self.rx_j[node] = self.rx_j.get(node, 0.0) + self.radio.rx_energy_j(size_bits)
        self.deliveries += 1

    def open_round(self, now: float) -> RoundRecord:
        rec = RoundRecord(time_s=now)
        self.rounds.append(rec)
        return rec

    def record_accept(self, rec: RoundRecord, task_id: int, leader: NodeId, now: float) -> None:
        rec.accepts.append((task_id, leader, now))

    def energy_of(self, node: NodeId) -> float:
        return self.tx_j.get(node, 0.0) + self.rx_j.get(node, 0.0)

    def total_energy_j(self, include_ap: bool = True) -> float:
        total = sum(self.tx_j.values()) + sum(self.rx_j.values())
        if not include_ap:
            total -= self.energy_of(AP_ID)
        return total


def round_metrics(rec: RoundRecord, nc: int) -> Tuple[int, int]:
    """Apt/inapt cluster split for one round: clusters apt (CPT) are the
    distinct leaders that accepted at least one task; CIT = NC - CPT."""
    cpt = len(rec.accepting_leaders())
    if cpt > nc:
        raise ValueError(f"accepting leaders ({cpt}) exceed registered clusters ({nc})")
    return cpt, nc - cpt


def round_latency(dispatch_time_s: float, accept_times_s: Sequence[float]) -> float:
    """Dispatch-to-last-accept latency of a round as seen by the AP."""
    if not accept_times_s:
        raise ValueError("round latency is undefined without accepts")
    return max(accept_times_s) - dispatch_time_s


@dataclass
class RunSummary:
    """End-of-run metric record for one simulation."""

    mode: str
    node_count: int
    sm_scenario: int
    sm_dispatch: int
    run_number: int
    seed: int
    nc: int
    nta: int
    nat: int
    nut: int
    allocation_rate: Optional[float]
    completed: int
    running: int
    rounds_dispatched: int
    rounds_with_accept: int
    cpt_mean: Optional[float]
    cit_mean: Optional[float]
    mean_lat_s: Optional[float]
    ec_total_j: float
    ec_nodes_j: float
    ec_ap_j: float
    tx_total_j: float
    rx_total_j: float
    sum_task_duration_s: float
    sends: int
    deliveries: int

    def as_row(self) -> Dict[str, object]:
        return dict(self.__dict__)


# Metrics that get a mean/CI column pair in aggregate output.
AGGREGATE_METRICS = (
    "nc",
    "nta",
    "nat",
    "nut",
    "allocation_rate",
    "completed",
    "cpt_mean",
    "cit_mean",
    "mean_lat_s",
    "ec_total_j",
    "ec_nodes_j",
    "ec_ap_j",
)


def t_critical(confidence: float, dof: int) -> float:
    """Two-sided Student-t critical value for the given confidence level.

    scipy's ppf is only ~1e-10 accurate at small dof, so the estimate is
    polished with Newton steps on the CDF to machine precision.
    """
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must be in (0, 1)")
    if dof < 1:
        raise ValueError("need at least one degree of freedom")
    from scipy.stats import t as student_t

    p = (1.0 + confidence) / 2.0
    x = float(student_t.ppf(p, dof))
    for _ in range(3):
        density = float(student_t.pdf(x, dof))
        if density == 0.0:
            break
        step = (float(student_t.cdf(x, dof)) - p) / density
        x -= step
        if abs(step) <= 1e-15 * max(1.0, abs(x)):
            break
    return x


def mean_and_halfwidth(
    values: Sequence[float], confidence: float = 0.95
) -> Tuple[float, Optional[float]]:
    """Sample mean and t-interval half-width; half-width is None for n < 2."""
    if not values:
        raise ValueError("cannot aggregate an empty sample")
    mean = statistics.fmean(values)
    if len(values) < 2:
        return mean, None
    sd = statistics.stdev(values)
    if sd == 0.0:
        return mean, 0.0
    hw = t_critical(confidence, len(values) - 1) * sd / math.sqrt(len(values))
    return mean, hw


def aggregate(
    rows: Sequence[Mapping[str, object]],
    metrics: Sequence[str] = AGGREGATE_METRICS,
    confidence: float = 0.95,
) -> Dict[str, Tuple[Optional[float], Optional[float]]]:
    """Per-metric (mean, CI half-width) across run summaries.

    Rows may carry None for undefined per-run values (e.g. latency in a run
    with no accepted round); those are dropped per metric. Callers pass rows
    sorted by run number so float summation order is reproducible.
    """
    out: Dict[str, Tuple[Optional[float], Optional[float]]] = {}
    for metric in metrics:
        values = [float(r[metric]) for r in rows if r.get(metric) is not None]
        if not values:
            out[metric] = (None, None)
            continue
        out[metric] = mean_and_halfwidth(values, confidence)
    return out
