"""Single-run assembly: scenario plus parameters in, metrics summary out."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional

from .audit import AuditReport, TraceAuditor
from .engine import ChannelModel, Simulator
from .messages import MessageSizes
from .metrics import MetricsLedger, RadioModel, RunSummary, round_latency, round_metrics
from .model import AP_ID, TaskStatus
from .protocol import AccessPoint, NodeAgent, ProtocolTiming
from .scenario import Scenario
from .similarity import SimilarityScale


@dataclass(frozen=True)
class SimParams:
    """Everything about a run except the scenario and the dispatch width."""

    timing: ProtocolTiming = ProtocolTiming()
    scale: SimilarityScale = SimilarityScale()
    channel: ChannelModel = ChannelModel()
    radio: RadioModel = RadioModel()
    sizes: MessageSizes = MessageSizes()
    until_s: float = 900.0


@dataclass
class RunResult:
    summary: RunSummary
    audit: Optional[AuditReport]
    ledger: MetricsLedger
    ap: AccessPoint
    agents: List[NodeAgent]


def run_simulation(
    scenario: Scenario,
    params: SimParams,
    sm: int,
    mode: str = "multi_task",
    trace_sink: Optional[Callable[[dict], None]] = None,
    audit: bool = False,
) -> RunResult:
    """Execute one seeded scenario to params.until_s and summarize it.

    sm is the dispatch width actually used by the AP (the baseline mode runs
    the same scenario with sm=1).
    """
    ledger = MetricsLedger(params.radio)
    positions = {n.id: n.pos for n in scenario.nodes}
    sim = Simulator(params.channel, positions, scenario.ap_pos, params.sizes, ledger)
    if trace_sink is not None:
        sim.add_sink(trace_sink)
    auditor: Optional[TraceAuditor] = None
    if audit:
        auditor = TraceAuditor(params.radio, params.channel, params.timing)
        sim.add_sink(auditor)

    agents = [NodeAgent(n, sim, params.timing, params.scale) for n in scenario.nodes]
    for agent in agents:
        sim.register(agent.state.id, agent.on_message)
    ap = AccessPoint(sim, scenario.tasks, sm, params.timing, ledger)
    sim.register(AP_ID, ap.on_message)

    for agent in agents:
        agent.start()
    ap.start()
    sim.run(params.until_s)

    summary = _summarize(scenario, ledger, ap, sm, mode)
    return RunResult(summary=summary, audit=auditor.report if auditor else None,
                     ledger=ledger, ap=ap, agents=agents)


def _summarize(
    scenario: Scenario, ledger: MetricsLedger, ap: AccessPoint, sm: int, mode: str
) -> RunSummary:
    tasks = scenario.tasks
    nc = len(ap.leader_list)
    nta = len(tasks)
    nat = sum(1 for t in tasks if t.accepted)
    nut = nta - nat
    completed = sum(1 for t in tasks if t.status is TaskStatus.COMPLETED)

    cpts: List[int] = []
    cits: List[int] = []
    lats: List[float] = []
    for rec in ledger.rounds:
        cpt, cit = round_metrics(rec, nc)
        cpts.append(cpt)
        cits.append(cit)
        if rec.accepts:
            lats.append(round_latency(rec.time_s, rec.accept_times()))

    ec_ap = ledger.energy_of(AP_ID)
    ec_total = ledger.total_energy_j()
    return RunSummary(
        mode=mode,
        node_count=scenario.node_count,
        sm_scenario=scenario.sm,
        sm_dispatch=sm,
        run_number=scenario.run_number,
        seed=scenario.seed,
        nc=nc,
        nta=nta,
        nat=nat,
        nut=nut,
        allocation_rate=(nat / nta) if nta else None,
        completed=completed,
        running=nat - completed,
        rounds_dispatched=len(ledger.rounds),
        rounds_with_accept=len(lats),
        cpt_mean=(sum(cpts) / len(cpts)) if cpts else None,
        cit_mean=(sum(cits) / len(cits)) if cits else None,
        mean_lat_s=(sum(lats) / len(lats)) if lats else None,
        ec_total_j=ec_total,
        ec_nodes_j=ec_total - ec_ap,
        ec_ap_j=ec_ap,
        tx_total_j=sum(ledger.tx_j.values()),
        rx_total_j=sum(ledger.rx_j.values()),
        sum_task_duration_s=sum(t.duration_s for t in tasks),
        sends=ledger.sends,
        deliveries=ledger.deliveries,
    )
