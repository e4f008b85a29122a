"""Packets and the greedy queueing disciplines that order them.

Every discipline is a priority key over waiting packets; the queue winner is
the packet minimising (key, packet id), so ties always break toward the
smallest id and every run is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence


@dataclass(slots=True)
class Packet:
    """One packet: fixed edge path plus progress/arrival bookkeeping.

    `arrived_in_queue_at` is the step the packet joined its *current* queue
    (FIFO/LIFO key); `injected_at` never changes (LIS/SIS key). `phase` is
    set by the interval strategy when the packet is adopted into a phase and
    stays None for plain runs and for packets delivered straight from a
    holding queue.
    """

    id: int
    path: tuple
    injected_at: int
    hops_done: int = 0
    arrived_in_queue_at: int = 0
    delivered_at: Optional[int] = None
    phase: Optional[int] = None

    @property
    def hops_remaining(self) -> int:
        return len(self.path) - self.hops_done

    @property
    def current_edge(self):
        """Edge the packet waits at; IndexError once delivered."""
        return self.path[self.hops_done]

    @property
    def system_time(self) -> Optional[int]:
        if self.delivered_at is None:
            return None
        return self.delivered_at - self.injected_at + 1


# A discipline key maps a queued packet to a sortable priority value.
DisciplineKey = Callable[[Packet], int]


def _fifo(p: Packet) -> int:  # first-in-first-out: earliest arrival in this queue
    return p.arrived_in_queue_at


def _lifo(p: Packet) -> int:  # last-in-first-out: latest arrival in this queue
    return -p.arrived_in_queue_at


def _lis(p: Packet) -> int:  # longest-in-system: earliest injection
    return p.injected_at


def _sis(p: Packet) -> int:  # shortest-in-system: latest injection
    return -p.injected_at


def _nts(p: Packet) -> int:  # nearest-to-source: fewest edges crossed so far
    return p.hops_done


def _ffs(p: Packet) -> int:  # farthest-from-source: most edges crossed so far
    return -p.hops_done


def _ntg(p: Packet) -> int:  # nearest-to-go: fewest edges still ahead
    return p.hops_remaining


def _ftg(p: Packet) -> int:  # farthest-to-go: most edges still ahead
    return -p.hops_remaining


DISCIPLINES: dict[str, DisciplineKey] = {
    "FIFO": _fifo,
    "LIFO": _lifo,
    "LIS": _lis,
    "SIS": _sis,
    "NTS": _nts,
    "FFS": _ffs,
    "NTG": _ntg,
    "FTG": _ftg,
}

# Keys that never read the part of the path still ahead of the packet.
NON_FORWARD_LOOKING: frozenset[str] = frozenset(
    {"FIFO", "LIFO", "LIS", "SIS", "NTS", "FFS"}
)


def get_discipline(discipline) -> DisciplineKey:
    """Resolve a discipline name (or pass a key function through)."""
    if callable(discipline):
        return discipline
    try:
        return DISCIPLINES[str(discipline).upper()]
    except KeyError:
        raise ValueError(
            f"unknown discipline {discipline!r}; expected one of {sorted(DISCIPLINES)}"
        ) from None


def is_non_forward_looking(discipline) -> bool:
    name = str(discipline).upper()
    if name not in DISCIPLINES:
        raise ValueError(f"unknown discipline {discipline!r}")
    return name in NON_FORWARD_LOOKING


def select(discipline, queue: Sequence[Packet], now: int = 0) -> Packet:
    """Pick the transmitting packet from a non-empty queue.

    `now` is accepted for symmetry with the engine's call site; no current
    key depends on it.
    """
    if not queue:
        raise ValueError("select() on an empty queue")
    key = get_discipline(discipline)
    return min(queue, key=lambda p: (key(p), p.id))
