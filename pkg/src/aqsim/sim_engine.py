"""Discrete-time executor of the queueing game: inject, select, transmit.

Step order is fixed: injections for the current step enter their first-edge
queues (and may move the same step); every non-empty queue picks one packet
under the discipline; all picked packets cross their edges simultaneously,
landing in the next queue effective the following step. Unit capacity and
packet conservation are re-checked every step.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import IO, Optional, Union

from .adversary import Adversary
from .network import EdgeId, Network
from .strategies import Packet, get_discipline


class EngineInvariantError(RuntimeError):
    """An internal conservation or bound check failed: an engine bug."""


@dataclass(frozen=True)
class StepStats:
    step: int
    total_in_system: int  # packets still queued after the step completed
    injections: int
    deliveries: int
    max_queue_len: int  # peak queue length after injection, before transmission


@dataclass
class Trace:
    steps: list[StepStats]
    packets: list[Packet]  # every injected packet, in id order
    truncated: bool  # cut at max_steps with work (or injections) remaining
    moves: Optional[list[tuple[int, EdgeId, int]]] = None  # (step, edge, packet id)

    @property
    def last_step(self) -> int:
        return self.steps[-1].step if self.steps else 0

    @property
    def max_system_time(self) -> Optional[int]:
        times = [p.system_time for p in self.packets if p.delivered_at is not None]
        return max(times) if times else None

    @property
    def max_queue_len(self) -> int:
        return max((s.max_queue_len for s in self.steps), default=0)

    @property
    def delivered_count(self) -> int:
        return sum(1 for p in self.packets if p.delivered_at is not None)


@dataclass
class SimState:
    network: Network
    queues: dict[EdgeId, list[Packet]]
    packets: list[Packet] = field(default_factory=list)
    steps: list[StepStats] = field(default_factory=list)
    moves: Optional[list[tuple[int, EdgeId, int]]] = None
    now: int = 1
    in_system: int = 0
    delivered: int = 0


def new_state(network: Network, record_moves: bool = False) -> SimState:
    return SimState(
        network=network,
        queues={e: [] for e in network.edge_ids},
        moves=[] if record_moves else None,
    )


def step(state: SimState, strategy, adversary: Adversary) -> SimState:
    """Execute one synchronous step, mutating and returning `state`."""
    key = get_discipline(strategy)
    now = state.now
    queues = state.queues
    packets = state.packets

    new_paths = adversary.injections_for(now)
    for path in new_paths:
        pkt = Packet(
            id=len(packets) + 1,
            path=tuple(path),
            injected_at=now,
            arrived_in_queue_at=now,
        )
        packets.append(pkt)
        queues[pkt.path[0]].append(pkt)
    state.in_system += len(new_paths)

    max_queue = max(map(len, queues.values()), default=0)

    chosen = [
        (e, min(q, key=lambda p: (key(p), p.id))) for e, q in queues.items() if q
    ]
    delivered_now = 0
    for e, pkt in chosen:
        queues[e].remove(pkt)
        pkt.hops_done += 1
        if state.moves is not None:
            state.moves.append((now, e, pkt.id))
        if pkt.hops_done == len(pkt.path):
            pkt.delivered_at = now
            delivered_now += 1
        else:
            pkt.arrived_in_queue_at = now + 1
            queues[pkt.path[pkt.hops_done]].append(pkt)
    state.delivered += delivered_now
    state.in_system -= delivered_now

    if len(packets) != state.in_system + state.delivered:
        raise EngineInvariantError(
            f"conservation broken at step {now}: "
            f"{len(packets)} injected != {state.in_system} queued + {state.delivered} delivered"
        )

    state.steps.append(
        StepStats(now, state.in_system, len(new_paths), delivered_now, max_queue)
    )
    state.now = now + 1
    return state


def run(
    network: Network,
    strategy,
    adversary: Adversary,
    max_steps: int,
    record_moves: bool = False,
) -> Trace:
    """Iterate `step` until `max_steps`, or until the system is empty and the
    adversary has nothing left to inject."""
    if max_steps < 1:
        raise ValueError(f"max_steps must be >= 1, got {max_steps}")
    get_discipline(strategy)  # fail fast on unknown names
    state = new_state(network, record_moves)
    while state.now <= max_steps:
        if state.in_system == 0 and adversary.done_after(state.now - 1):
            break
        step(state, strategy, adversary)
    truncated = state.in_system > 0 or not adversary.done_after(state.now - 1)
    return Trace(state.steps, state.packets, truncated, state.moves)


# ---- CSV export -----------------------------------------------------------


def _open_maybe(dest: Union[str, IO], mode: str = "w"):
    if hasattr(dest, "write"):
        return dest, False
    return open(dest, mode, newline=""), True


def write_trace_csv(trace: Trace, dest: Union[str, IO], header_comment: str = "") -> None:
    """One row per step: step,total_in_system,injections,deliveries,max_queue_len."""
    out, close = _open_maybe(dest)
    try:
        if header_comment:
            out.write(f"# {header_comment}\n")
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["step", "total_in_system", "injections", "deliveries", "max_queue_len"])
        for s in trace.steps:
            w.writerow([s.step, s.total_in_system, s.injections, s.deliveries, s.max_queue_len])
    finally:
        if close:
            out.close()


def write_packets_csv(trace: Trace, dest: Union[str, IO], header_comment: str = "") -> None:
    """One row per packet: packet_id,injected_at,delivered_at,system_time,path_len.

    Undelivered packets leave delivered_at and system_time empty.
    """
    out, close = _open_maybe(dest)
    try:
        if header_comment:
            out.write(f"# {header_comment}\n")
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["packet_id", "injected_at", "delivered_at", "system_time", "path_len"])
        for p in trace.packets:
            done = p.delivered_at is not None
            w.writerow(
                [
                    p.id,
                    p.injected_at,
                    p.delivered_at if done else "",
                    p.system_time if done else "",
                    len(p.path),
                ]
            )
    finally:
        if close:
            out.close()
