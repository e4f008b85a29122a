"""(r,b)-adversaries: rate-limited injection generators and the window-check oracle.

The admission rule: for every edge e and every closed step interval I, the
number of injected packets whose path contains e and whose time lies in I is
at most floor(r*|I|) + b, with |I| counted inclusively and time starting at
step 1. All window arithmetic is exact (rational r).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from operator import sub
from typing import Iterable, Optional, Sequence

from .network import EdgeId, Network, PacketPath, validate_path


class AdversaryError(ValueError):
    pass


def as_rate(r) -> Fraction:
    """Exact rational injection rate in (0,1); floats are read as their
    shortest decimal form (0.1 means exactly 1/10)."""
    if isinstance(r, Fraction):
        rate = r
    elif isinstance(r, float):
        rate = Fraction(str(r))
    elif isinstance(r, (int, str)):
        rate = Fraction(r)
    else:
        raise AdversaryError(f"cannot read injection rate from {r!r}")
    if not 0 < rate < 1:
        raise AdversaryError(f"injection rate must satisfy 0 < r < 1, got {rate}")
    return rate


def _check_burst(b) -> int:
    if not isinstance(b, int) or isinstance(b, bool) or b < 1:
        raise AdversaryError(f"burst must be an integer >= 1, got {b!r}")
    return b


@dataclass(frozen=True)
class InjectionEvent:
    time: int
    path: PacketPath


@dataclass(frozen=True)
class Violation:
    """A window that breaks the (r,b) constraint."""

    edge: EdgeId
    start: int
    end: int
    count: int
    allowed: int

    def __str__(self) -> str:
        length = self.end - self.start + 1
        return (
            f"edge {self.edge!r}: {self.count} injections in steps "
            f"[{self.start},{self.end}] exceed floor(r*{length})+b = {self.allowed}"
        )


@dataclass(frozen=True)
class AdmissibilityResult:
    ok: bool
    violation: Optional[Violation] = None

    def __bool__(self) -> bool:
        return self.ok


# ---- the oracle ----------------------------------------------------------


def verify_admissible(
    events: Sequence[InjectionEvent], r, b, horizon: int
) -> AdmissibilityResult:
    """Exhaustively check every edge and every interval [s,t] within [1,horizon].

    Returns the first violation found — smallest interval length first, then
    earliest end step, edges in first-appearance order. Intended as the
    independent oracle for every generator in this module; cost grows with
    horizon^2 per distinct per-edge injection profile.
    """
    rate = as_rate(r)
    b = _check_burst(b)
    if events:
        latest = max(ev.time for ev in events)
        if horizon < latest:
            raise AdversaryError(f"horizon {horizon} precedes last event at step {latest}")
        if min(ev.time for ev in events) < 1:
            raise AdversaryError("event times must be >= 1")
    if horizon < 1:
        raise AdversaryError("horizon must be >= 1")

    # Per-edge injection counts per step; a packet counts once per edge it uses.
    counts: dict[EdgeId, list[int]] = {}
    edge_order: list[EdgeId] = []
    for ev in events:
        for e in dict.fromkeys(ev.path.edges):
            if e not in counts:
                counts[e] = [0] * (horizon + 1)
                edge_order.append(e)
            counts[e][ev.time] += 1

    p, q = rate.numerator, rate.denominator
    allowed = [0] + [(p * length) // q + b for length in range(1, horizon + 1)]

    checked: dict[tuple, EdgeId] = {}  # identical profiles need checking once
    for e in edge_order:
        profile = tuple(counts[e])
        if profile in checked:
            continue
        checked[profile] = e
        prefix = [0] * (horizon + 1)
        acc = 0
        for t in range(1, horizon + 1):
            acc += counts[e][t]
            prefix[t] = acc
        for length in range(1, horizon + 1):
            cap = allowed[length]
            # max over t of prefix[t] - prefix[t-length], t = length..horizon
            worst = max(map(sub, prefix[length:], prefix[: horizon - length + 1]))
            if worst > cap:
                for t in range(length, horizon + 1):
                    got = prefix[t] - prefix[t - length]
                    if got > cap:
                        return AdmissibilityResult(
                            False, Violation(e, t - length + 1, t, got, cap)
                        )
    return AdmissibilityResult(True)


# ---- generators -----------------------------------------------------------


class Adversary:
    """Injection source for the engine.

    `injections_for(step)` yields the paths injected at that step; the engine
    calls it once per step in increasing order. `done_after(step)` is true when
    no injection can occur strictly after `step` (drives run termination).
    """

    r: Optional[Fraction] = None
    b: int = 1

    def injections_for(self, step: int) -> list[PacketPath]:
        raise NotImplementedError

    def done_after(self, step: int) -> bool:
        raise NotImplementedError

    def events(self, horizon: int) -> list[InjectionEvent]:
        """The injection sequence up to `horizon`, for verification/replay."""
        raise NotImplementedError


class ScriptedAdversary(Adversary):
    """Replays a fixed event list; refuses construction if the script breaks
    the declared (r,b) budget."""

    def __init__(
        self,
        events: Iterable[InjectionEvent],
        r,
        b,
        network: Optional[Network] = None,
    ):
        self.r = as_rate(r)
        self.b = _check_burst(b)
        self._events = list(events)
        for prev, nxt in zip(self._events, self._events[1:]):
            if nxt.time < prev.time:
                raise AdversaryError("events must be sorted by time")
        for ev in self._events:
            if ev.time < 1:
                raise AdversaryError(f"event time must be >= 1, got {ev.time}")
            if network is not None and not validate_path(network, ev.path):
                raise AdversaryError(f"event at step {ev.time}: invalid path {ev.path.edges}")
        self._last = max((ev.time for ev in self._events), default=0)
        if self._events:
            result = verify_admissible(self._events, self.r, self.b, self._last)
            if not result:
                raise AdversaryError(f"inadmissible script: {result.violation}")
        self._by_step: dict[int, list[PacketPath]] = {}
        for ev in self._events:
            self._by_step.setdefault(ev.time, []).append(ev.path)

    def injections_for(self, step: int) -> list[PacketPath]:
        return self._by_step.get(step, [])

    def done_after(self, step: int) -> bool:
        return step >= self._last

    def events(self, horizon: int) -> list[InjectionEvent]:
        return [ev for ev in self._events if ev.time <= horizon]


def scripted_adversary(events, r, b, network: Optional[Network] = None) -> ScriptedAdversary:
    return ScriptedAdversary(events, r, b, network)


class BurstAdversary(Adversary):
    """All packets at step 1, nothing afterwards. Admissible for every rate
    r in (0,1) as long as no edge is used by more than b paths."""

    def __init__(self, network: Network, paths: Sequence[PacketPath], b):
        self.b = _check_burst(b)
        self.r = None  # unconstrained: single-step windows only need the burst
        self._paths = list(paths)
        load: dict[EdgeId, int] = {}
        for path in self._paths:
            if not validate_path(network, path):
                raise AdversaryError(f"invalid path {path.edges}")
            for e in dict.fromkeys(path.edges):
                load[e] = load.get(e, 0) + 1
        if load and max(load.values()) > self.b:
            worst = max(load, key=lambda e: (load[e], str(e)))
            raise AdversaryError(
                f"edge {worst!r} carries {load[worst]} paths, exceeding burst b={self.b}"
            )

    def injections_for(self, step: int) -> list[PacketPath]:
        return list(self._paths) if step == 1 else []

    def done_after(self, step: int) -> bool:
        return step >= 1

    def events(self, horizon: int) -> list[InjectionEvent]:
        return [InjectionEvent(1, path) for path in self._paths]


def burst_adversary(network: Network, paths, b) -> BurstAdversary:
    return BurstAdversary(network, paths, b)


class SaturatingAdversary(Adversary):
    """Greedy maximal injector of one fixed path: burst of b at step 1, then
    one more packet whenever every window constraint still holds.

    The incremental check is exact: injecting m at step t is allowed iff
    q*(total(t-1) + m) <= min_{0<=u<t} (q*total(u) - p*u) + p*t + q*b,
    which is the all-windows constraint cleared of floors (counts and b are
    integers, so count <= floor(r|I|)+b and count <= r|I|+b coincide).
    """

    def __init__(self, network: Network, path: PacketPath, r, b):
        if not validate_path(network, path):
            raise AdversaryError(f"invalid path {path.edges}")
        self.r = as_rate(r)
        self.b = _check_burst(b)
        self._path = path
        self._counts: list[int] = [0]  # injections per step, index 0 unused
        self._total = 0  # sum of counts
        self._min_g = 0  # min over computed u of q*total(u) - p*u  (u=0 gives 0)

    def _extend(self, step: int) -> None:
        p, q = self.r.numerator, self.r.denominator
        while len(self._counts) <= step:
            t = len(self._counts)
            headroom = (self._min_g + p * t + q * self.b - q * self._total) // q
            m = max(0, min(headroom, self.b if t == 1 else 1))
            self._counts.append(m)
            self._total += m
            self._min_g = min(self._min_g, q * self._total - p * t)

    def injections_for(self, step: int) -> list[PacketPath]:
        self._extend(step)
        return [self._path] * self._counts[step]

    def done_after(self, step: int) -> bool:
        return False  # keeps injecting forever

    def events(self, horizon: int) -> list[InjectionEvent]:
        self._extend(horizon)
        return [
            InjectionEvent(t, self._path)
            for t in range(1, horizon + 1)
            for _ in range(self._counts[t])
        ]


def saturating_adversary(network: Network, path: PacketPath, r, b) -> SaturatingAdversary:
    return SaturatingAdversary(network, path, r, b)
