"""Static routing: all packets present at step 1, none injected later.

Covers instance/schedule types with an independent feasibility checker, a
greedy scheduler built on the engine (burst at step 1), the n*d bound, a
branch-and-bound optimal-makespan oracle for toy instances, and exhaustive /
randomized instance generators for line and in-tree shapes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from itertools import combinations_with_replacement, product
from random import Random
from typing import IO, Iterable, Iterator, Optional, Sequence, Union

from .adversary import burst_adversary
from .network import (
    CongestionDilation,
    EdgeId,
    Network,
    NetworkError,
    PacketPath,
    congestion_dilation,
    in_tree_network,
    line_network,
    validate_path,
)
from .sim_engine import EngineInvariantError, _open_maybe, run


class InfeasibleScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class StaticInstance:
    network: Network
    paths: tuple[PacketPath, ...]
    nd: CongestionDilation

    @property
    def n(self) -> int:
        return self.nd.n

    @property
    def d(self) -> int:
        return self.nd.d


def make_instance(network: Network, paths: Iterable[PacketPath]) -> StaticInstance:
    path_tuple = tuple(paths)
    if not path_tuple:
        raise NetworkError("static instance needs at least one packet")
    for i, p in enumerate(path_tuple):
        if not validate_path(network, p):
            raise NetworkError(f"packet {i + 1}: invalid path {p.edges}")
    return StaticInstance(network, path_tuple, congestion_dilation(path_tuple))


@dataclass(frozen=True)
class Schedule:
    """Per-step, per-edge moves: (step, edge id, 1-based packet index)."""

    instance: StaticInstance
    moves: tuple[tuple[int, EdgeId, int], ...]


def check_schedule(schedule: Schedule) -> None:
    """Raise InfeasibleScheduleError (with the broken constraint) unless every
    move follows its packet's path in order, steps are >= 1 and strictly
    increasing per packet, and no edge carries two packets in one step."""
    inst = schedule.instance
    per_packet: dict[int, list[tuple[int, EdgeId]]] = {}
    slot_taken: set[tuple[int, EdgeId]] = set()
    for step_no, edge, pid in schedule.moves:
        if not 1 <= pid <= len(inst.paths):
            raise InfeasibleScheduleError(f"move references unknown packet {pid}")
        if step_no < 1:
            raise InfeasibleScheduleError(f"packet {pid}: move at step {step_no} < 1")
        if (step_no, edge) in slot_taken:
            raise InfeasibleScheduleError(
                f"edge {edge!r} carries two packets at step {step_no}"
            )
        slot_taken.add((step_no, edge))
        per_packet.setdefault(pid, []).append((step_no, edge))
    for pid, moves in per_packet.items():
        moves.sort()
        path = inst.paths[pid - 1].edges
        if len(moves) > len(path):
            raise InfeasibleScheduleError(f"packet {pid}: more moves than path edges")
        last_step = 0
        for k, (step_no, edge) in enumerate(moves):
            if edge != path[k]:
                raise InfeasibleScheduleError(
                    f"packet {pid}: move {k + 1} crosses {edge!r}, path says {path[k]!r}"
                )
            if step_no <= last_step:
                raise InfeasibleScheduleError(
                    f"packet {pid}: edge {k + 1} not strictly after edge {k}"
                )
            last_step = step_no
    return None


def is_complete(schedule: Schedule) -> bool:
    """True iff every packet crosses its whole path."""
    crossed: dict[int, int] = {}
    for _, _, pid in schedule.moves:
        crossed[pid] = crossed.get(pid, 0) + 1
    return all(
        crossed.get(i + 1, 0) == len(p.edges) for i, p in enumerate(schedule.instance.paths)
    )


def makespan_of(schedule: Schedule) -> int:
    """Last step at which any packet moves (0 for no moves); checks feasibility."""
    check_schedule(schedule)
    return max((m[0] for m in schedule.moves), default=0)


def lemma1_bound(n: int, d: int) -> int:
    """Worst-case steps for any greedy discipline on a static instance: n*d."""
    if n < 1 or d < 1:
        raise ValueError(f"n and d must be >= 1, got n={n}, d={d}")
    return n * d


def greedy_schedule(instance: StaticInstance, discipline) -> tuple[Schedule, int]:
    """Run the engine with everything injected at step 1; lift the trace into
    a Schedule. The run must drain within n*d steps — anything else is a bug."""
    bound = lemma1_bound(instance.n, instance.d)
    adversary = burst_adversary(instance.network, instance.paths, b=instance.n)
    trace = run(instance.network, discipline, adversary, max_steps=bound, record_moves=True)
    if trace.truncated:
        raise EngineInvariantError(
            f"greedy {discipline} run exceeded the n*d = {bound} bound"
        )
    makespan = max((m[0] for m in trace.moves), default=0)
    return Schedule(instance, tuple(trace.moves)), makespan


# ---- brute-force optimal makespan -----------------------------------------


def bruteforce_optimal_makespan(
    instance: StaticInstance, cap: int, upper_bound: Optional[int] = None
) -> Optional[int]:
    """Exhaustive branch-and-bound over per-step move choices; the minimum
    feasible makespan, or None if every schedule needs more than `cap` steps.

    Pruning is admissible only: (a) remaining steps can never beat the larger
    of the longest remaining path and the heaviest remaining edge load, and
    (b) a state revisited no earlier than before cannot improve. Skipping
    fully-idle steps is safe because deleting an idle step from any feasible
    schedule keeps it feasible. `upper_bound` may pass a known-feasible
    makespan (e.g. from greedy_schedule) to tighten the search.
    """
    if cap < instance.d:
        raise ValueError(f"cap {cap} below dilation {instance.d}")
    paths = [p.edges for p in instance.paths]
    lengths = [len(pe) for pe in paths]
    total = len(paths)
    edge_order = [e for e in instance.network.edge_ids]

    best = cap + 1 if upper_bound is None else min(cap, upper_bound) + 1
    memo: dict[tuple[int, ...], int] = {}

    def lower_bound(hops: tuple[int, ...]) -> int:
        slack = 0
        load: dict[EdgeId, int] = {}
        for i in range(total):
            rem = lengths[i] - hops[i]
            if rem > slack:
                slack = rem
            for e in paths[i][hops[i] :]:
                load[e] = load.get(e, 0) + 1
        if load:
            heaviest = max(load.values())
            if heaviest > slack:
                slack = heaviest
        return slack

    def dfs(hops: tuple[int, ...], step_no: int) -> None:
        nonlocal best
        if all(hops[i] == lengths[i] for i in range(total)):
            if step_no - 1 < best:
                best = step_no - 1
            return
        if step_no - 1 + lower_bound(hops) >= best:
            return
        seen = memo.get(hops)
        if seen is not None and seen <= step_no:
            return
        memo[hops] = step_no

        waiting: dict[EdgeId, list[int]] = {}
        for i in range(total):
            if hops[i] < lengths[i]:
                waiting.setdefault(paths[i][hops[i]], []).append(i)
        busy_edges = [e for e in edge_order if e in waiting]
        options = [waiting[e] + [None] for e in busy_edges]
        for combo in product(*options):
            if all(c is None for c in combo):
                continue
            child = list(hops)
            for c in combo:
                if c is not None:
                    child[c] += 1
            dfs(tuple(child), step_no + 1)

    dfs(tuple([0] * total), 1)
    return best if best <= cap else None


# ---- instance generation ---------------------------------------------------


def line_paths(num_edges: int) -> list[PacketPath]:
    """Every directed subpath e_i..e_j of a line, ordered by (start, end)."""
    return [
        PacketPath(tuple(f"e{k}" for k in range(i, j + 1)))
        for i in range(1, num_edges + 1)
        for j in range(i, num_edges + 1)
    ]


def tree_paths(parents: Sequence[int]) -> list[PacketPath]:
    """Every rootward run in an in-tree, ordered by (start node, length)."""
    out: list[PacketPath] = []
    for start in range(1, len(parents) + 1):
        edges: list[str] = []
        v = start
        while v != 0:
            edges.append(f"e{v}")
            out.append(PacketPath(tuple(edges)))
            v = parents[v - 1]
    return out


def _canonical_shape(parents: Sequence[int]) -> tuple:
    children: list[list[int]] = [[] for _ in range(len(parents) + 1)]
    for child, par in enumerate(parents, start=1):
        children[par].append(child)

    def canon(v: int) -> tuple:
        return tuple(sorted(canon(c) for c in children[v]))

    return canon(0)


def _is_path_shape(parents: Sequence[int]) -> bool:
    return len(set(parents)) == len(parents)  # no node has two children


def tree_shapes(max_edges: int) -> list[tuple[int, ...]]:
    """Canonical parent vectors of all non-path in-trees with <= max_edges
    edges (path shapes are enumerated as lines instead)."""
    shapes: list[tuple[int, ...]] = []
    seen: set[tuple] = set()
    for m in range(1, max_edges + 1):
        for parents in product(*[range(i) for i in range(1, m + 1)]):
            if _is_path_shape(parents):
                continue
            key = _canonical_shape(parents)
            if key in seen:
                continue
            seen.add(key)
            shapes.append(parents)
    return shapes


def enumerate_instances(
    max_packets: int, max_edges: int, shapes: Sequence[str] = ("line", "tree")
) -> Iterator[StaticInstance]:
    """All static instances with 1..max_packets packets on line and non-path
    in-tree networks with 1..max_edges edges, in deterministic order."""
    for shape in shapes:
        if shape not in ("line", "tree"):
            raise ValueError(f"unknown shape {shape!r}; expected 'line' or 'tree'")
    if max_packets < 1 or max_edges < 1:
        raise ValueError("max_packets and max_edges must be >= 1")
    pools: list[tuple[Network, list[PacketPath]]] = []
    if "line" in shapes:
        for k in range(1, max_edges + 1):
            pools.append((line_network(k), line_paths(k)))
    if "tree" in shapes:
        for parents in tree_shapes(max_edges):
            pools.append((in_tree_network(parents), tree_paths(parents)))
    for network, candidates in pools:
        for size in range(1, max_packets + 1):
            for combo in combinations_with_replacement(candidates, size):
                yield make_instance(network, combo)


def random_instance(rng: Random, max_packets: int, max_edges: int) -> StaticInstance:
    """One random line/in-tree instance; deterministic given the Random state."""
    if rng.random() < 0.5:
        k = rng.randint(1, max_edges)
        network = line_network(k)
        count = rng.randint(1, max_packets)
        paths = []
        for _ in range(count):
            i = rng.randint(1, k)
            j = rng.randint(i, k)
            paths.append(PacketPath(tuple(f"e{x}" for x in range(i, j + 1))))
    else:
        m = rng.randint(1, max_edges)
        parents = [rng.randint(0, i - 1) for i in range(1, m + 1)]
        network = in_tree_network(parents)
        depth = [0] * (m + 1)
        for v in range(1, m + 1):
            depth[v] = depth[parents[v - 1]] + 1
        count = rng.randint(1, max_packets)
        paths = []
        for _ in range(count):
            start = rng.randint(1, m)
            hops = rng.randint(1, depth[start])
            edges = []
            v = start
            for _ in range(hops):
                edges.append(f"e{v}")
                v = parents[v - 1]
            paths.append(PacketPath(tuple(edges)))
    return make_instance(network, paths)


# ---- the oracle sweep -------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    instance_id: int
    packets: int
    edges: int
    n: int
    d: int
    optimal: Optional[int]
    greedy_fifo: int
    lemma1_bound: int

    @property
    def exceeds_n_plus_d(self) -> bool:
        return self.optimal is not None and self.optimal > self.n + self.d


def run_sweep(
    max_packets: int, max_edges: int, shapes: Sequence[str] = ("line", "tree")
) -> list[SweepRow]:
    """Brute-force optimum vs greedy FIFO for every enumerated instance."""
    rows: list[SweepRow] = []
    for idx, inst in enumerate(enumerate_instances(max_packets, max_edges, shapes), start=1):
        _, greedy = greedy_schedule(inst, "FIFO")
        cap = lemma1_bound(inst.n, inst.d)
        optimal = bruteforce_optimal_makespan(inst, cap, upper_bound=greedy)
        rows.append(
            SweepRow(
                idx,
                len(inst.paths),
                len(inst.network.edges),
                inst.n,
                inst.d,
                optimal,
                greedy,
                cap,
            )
        )
    return rows


def sweep_summary(rows: Sequence[SweepRow]) -> str:
    bad = [row for row in rows if row.exceeds_n_plus_d]
    if bad:
        worst = max(bad, key=lambda row: row.optimal - (row.n + row.d))
        return (
            f"{len(bad)} of {len(rows)} instances exceed n+d "
            f"(worst: instance {worst.instance_id}, optimal {worst.optimal} "
            f"vs n+d = {worst.n + worst.d})"
        )
    return f"no instance exceeded n+d ({len(rows)} instances checked)"


def write_sweep_csv(
    rows: Sequence[SweepRow], dest: Union[str, IO], header_comment: str = ""
) -> None:
    """instance_id,packets,edges,n,d,optimal,greedy_fifo,lemma1_bound"""
    out, close = _open_maybe(dest)
    try:
        if header_comment:
            out.write(f"# {header_comment}\n")
        w = csv.writer(out, lineterminator="\n")
        w.writerow(
            ["instance_id", "packets", "edges", "n", "d", "optimal", "greedy_fifo", "lemma1_bound"]
        )
        for row in rows:
            w.writerow(
                [
                    row.instance_id,
                    row.packets,
                    row.edges,
                    row.n,
                    row.d,
                    row.optimal if row.optimal is not None else "exceeds_cap",
                    row.greedy_fifo,
                    row.lemma1_bound,
                ]
            )
    finally:
        if close:
            out.close()
