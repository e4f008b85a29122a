"""Phased routing: route the current packet set as a static instance while
holding all new injections in second queues.

Every edge owns an active queue and a holding queue. Injections land in
holding; only active packets advance (under a pluggable inner discipline).
When the active set empties, the phase ends that same step: holding queues
are copied into the active queues (per edge, sorted by packet id), and the
next phase starts the following step. Step 0 is the empty startup state, so
the empty phase 0 closes immediately at step 1 and step-1 injections always
form phase 1.

With the improvement enabled, a holding packet may cross its current edge
while a non-empty phase runs, provided no undelivered active packet has that
edge among its remaining edges — it can never collide with the phase. It
moves at most one edge per step and stays in holding (or is delivered).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import IO, Optional, Union

from .adversary import Adversary
from .network import EdgeId, Network, PacketPath, congestion_dilation
from .sim_engine import EngineInvariantError, StepStats, Trace, _open_maybe
from .strategies import Packet, get_discipline


class Lemma1ViolationError(EngineInvariantError):
    """A phase outlived its n*d bound; the static routing core is broken."""


@dataclass(frozen=True)
class PhaseRecord:
    phase_index: int
    packet_count: int
    duration_steps: int
    n_i: int
    d_i: int
    max_active_queue_len: int

    @property
    def lemma1_bound(self) -> int:
        return self.n_i * self.d_i


@dataclass
class PhaseState:
    network: Network
    active: dict[EdgeId, list[Packet]]
    holding: dict[EdgeId, list[Packet]]
    packets: list[Packet] = field(default_factory=list)
    records: list[PhaseRecord] = field(default_factory=list)
    steps: list[StepStats] = field(default_factory=list)
    now: int = 1
    in_system: int = 0
    delivered: int = 0
    # current phase
    phase_index: int = 0
    phase_open: bool = True  # phase 0 (empty) is running at startup
    phase_start: int = 1
    phase_count: int = 0
    phase_n: int = 0
    phase_d: int = 0
    phase_max_queue: int = 0
    active_remaining: int = 0
    active_packets: list[Packet] = field(default_factory=list)


def new_phase_state(network: Network) -> PhaseState:
    return PhaseState(
        network=network,
        active={e: [] for e in network.edge_ids},
        holding={e: [] for e in network.edge_ids},
    )


def _close_phase(state: PhaseState) -> None:
    duration = state.now - state.phase_start + 1 if state.phase_count else 0
    bound = state.phase_n * state.phase_d
    if state.phase_count and duration > bound:
        raise Lemma1ViolationError(
            f"phase {state.phase_index} took {duration} steps, bound n*d = {bound}"
        )
    state.records.append(
        PhaseRecord(
            state.phase_index,
            state.phase_count,
            duration,
            state.phase_n,
            state.phase_d,
            state.phase_max_queue,
        )
    )
    state.phase_open = False


def _start_next_phase(state: PhaseState) -> None:
    adopted: list[Packet] = []
    for e in state.network.edge_ids:
        movers = sorted(state.holding[e], key=lambda p: p.id)
        state.holding[e] = []
        state.active[e] = movers
        adopted.extend(movers)
    state.phase_index += 1
    state.phase_start = state.now + 1
    for p in adopted:
        p.arrived_in_queue_at = state.phase_start
        p.phase = state.phase_index
    nd = congestion_dilation([PacketPath(p.path[p.hops_done :]) for p in adopted])
    state.phase_n, state.phase_d = nd.n, nd.d
    state.phase_count = len(adopted)
    state.phase_max_queue = 0
    state.active_remaining = len(adopted)
    state.active_packets = adopted
    state.phase_open = True


def interval_step(
    state: PhaseState, inner_discipline, adversary: Adversary, improvement_on: bool
) -> PhaseState:
    """One synchronous step of the phased protocol (mutates `state`)."""
    key = get_discipline(inner_discipline)
    now = state.now
    active, holding = state.active, state.holding

    # (1) injections join the holding queue of their first edge
    new_paths = adversary.injections_for(now)
    for path in new_paths:
        pkt = Packet(
            id=len(state.packets) + 1,
            path=tuple(path),
            injected_at=now,
            arrived_in_queue_at=now,
        )
        state.packets.append(pkt)
        holding[pkt.path[0]].append(pkt)
    state.in_system += len(new_paths)

    max_queue = max(
        (len(active[e]) + len(holding[e]) for e in state.network.edge_ids), default=0
    )
    if state.phase_open and state.phase_count:
        state.phase_max_queue = max(
            state.phase_max_queue, max(map(len, active.values()), default=0)
        )

    delivered_now = 0

    # (2) pass-through: holding packets may cross edges the running phase
    # can no longer need (idle set fixed before any movement this step)
    if improvement_on and state.phase_open and state.phase_count:
        demanded: set = set()
        for p in state.active_packets:
            if p.delivered_at is None:
                demanded.update(p.path[p.hops_done :])
        for e in state.network.edge_ids:
            if e in demanded:
                continue
            eligible = [p for p in holding[e] if p.arrived_in_queue_at <= now]
            if not eligible:
                continue
            mover = min(eligible, key=lambda p: (p.arrived_in_queue_at, p.id))
            holding[e].remove(mover)
            mover.hops_done += 1
            if mover.hops_done == len(mover.path):
                mover.delivered_at = now
                delivered_now += 1
            else:
                mover.arrived_in_queue_at = now + 1
                holding[mover.path[mover.hops_done]].append(mover)

    # (3) the active phase advances exactly like the plain engine
    chosen = [
        (e, min(q, key=lambda p: (key(p), p.id))) for e, q in active.items() if q
    ]
    for e, pkt in chosen:
        active[e].remove(pkt)
        pkt.hops_done += 1
        if pkt.hops_done == len(pkt.path):
            pkt.delivered_at = now
            delivered_now += 1
            state.active_remaining -= 1
        else:
            pkt.arrived_in_queue_at = now + 1
            active[pkt.path[pkt.hops_done]].append(pkt)

    state.delivered += delivered_now
    state.in_system -= delivered_now
    if len(state.packets) != state.in_system + state.delivered:
        raise EngineInvariantError(
            f"conservation broken at step {now}: "
            f"{len(state.packets)} injected != {state.in_system} queued + "
            f"{state.delivered} delivered"
        )

    # live bound check: a still-open phase at n*d steps can no longer finish in time
    if (
        state.phase_open
        and state.phase_count
        and state.active_remaining > 0
        and now - state.phase_start + 1 >= state.phase_n * state.phase_d
    ):
        raise Lemma1ViolationError(
            f"phase {state.phase_index} still running after "
            f"{now - state.phase_start + 1} steps, bound n*d = "
            f"{state.phase_n * state.phase_d}"
        )

    # (4) phase end: record it, then adopt the held packets as the next phase
    if state.phase_open and state.active_remaining == 0:
        _close_phase(state)
    if not state.phase_open and any(holding[e] for e in state.network.edge_ids):
        _start_next_phase(state)

    state.steps.append(
        StepStats(now, state.in_system, len(new_paths), delivered_now, max_queue)
    )
    state.now = now + 1
    return state


def run_interval(
    network: Network,
    inner_discipline,
    adversary: Adversary,
    max_steps: int,
    improvement_on: bool = False,
    max_phases: Optional[int] = None,
) -> tuple[Trace, list[PhaseRecord]]:
    """Full phased run; stops at max_steps, at system drain, or once
    `max_phases` non-startup phases have completed."""
    if max_steps < 1:
        raise ValueError(f"max_steps must be >= 1, got {max_steps}")
    get_discipline(inner_discipline)  # fail fast on unknown names
    state = new_phase_state(network)
    while state.now <= max_steps:
        if (
            state.in_system == 0
            and not state.phase_open
            and adversary.done_after(state.now - 1)
        ):
            break
        interval_step(state, inner_discipline, adversary, improvement_on)
        if (
            max_phases is not None
            and state.records
            and state.records[-1].phase_index >= max_phases
        ):
            break
    truncated = state.in_system > 0 or not adversary.done_after(state.now - 1)

    _check_startup_rule(state)
    return Trace(state.steps, state.packets, truncated, None), state.records


def _check_startup_rule(state: PhaseState) -> None:
    """Phase 0 is empty and instantaneous; step-1 injections belong to phase 1."""
    if state.records:
        first = state.records[0]
        if first.phase_index != 0 or first.packet_count != 0 or first.duration_steps != 0:
            raise EngineInvariantError(f"startup rule broken: first record {first}")
    for p in state.packets:
        if p.injected_at == 1 and p.phase not in (None, 1):
            raise EngineInvariantError(
                f"startup rule broken: packet {p.id} injected at step 1 is phase {p.phase}"
            )
        if p.injected_at == 1 and p.phase is None and p.delivered_at is None:
            raise EngineInvariantError(
                f"startup rule broken: packet {p.id} injected at step 1 never adopted"
            )


def write_phases_csv(
    records: list[PhaseRecord], dest: Union[str, IO], header_comment: str = ""
) -> None:
    """One row per completed phase:
    phase_index,packet_count,n_i,d_i,duration,lemma1_bound."""
    out, close = _open_maybe(dest)
    try:
        if header_comment:
            out.write(f"# {header_comment}\n")
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["phase_index", "packet_count", "n_i", "d_i", "duration", "lemma1_bound"])
        for rec in records:
            w.writerow(
                [
                    rec.phase_index,
                    rec.packet_count,
                    rec.n_i,
                    rec.d_i,
                    rec.duration_steps,
                    rec.lemma1_bound,
                ]
            )
    finally:
        if close:
            out.close()
