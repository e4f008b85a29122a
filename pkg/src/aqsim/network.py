"""Directed network model, packet paths, and congestion/dilation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Iterator, Sequence

NodeId = Hashable
EdgeId = Hashable


class NetworkError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    src: NodeId
    dst: NodeId
    id: EdgeId


@dataclass(frozen=True)
class Network:
    """Directed graph with unit-capacity edges. Immutable once built."""

    nodes: tuple[NodeId, ...]
    edges: tuple[Edge, ...]
    edge_by_id: dict[EdgeId, Edge] = field(repr=False, compare=False)

    @property
    def edge_ids(self) -> tuple[EdgeId, ...]:
        return tuple(e.id for e in self.edges)


def build_network(nodes: Sequence[NodeId], edges: Iterable[tuple[NodeId, NodeId, EdgeId]]) -> Network:
    """Validate and freeze a network; edge iteration order is the declaration order.

    Rejects duplicate node ids, duplicate edge ids, endpoints outside the node
    set, and parallel edges (a second edge on the same ordered node pair).
    """
    node_tuple = tuple(nodes)
    if not node_tuple:
        raise NetworkError("node list must be non-empty")
    node_set = set(node_tuple)
    if len(node_set) != len(node_tuple):
        raise NetworkError("duplicate node id in node list")

    edge_list: list[Edge] = []
    by_id: dict[EdgeId, Edge] = {}
    seen_pairs: set[tuple[NodeId, NodeId]] = set()
    for src, dst, eid in edges:
        if eid in by_id:
            raise NetworkError(f"duplicate edge id {eid!r}")
        if src not in node_set:
            raise NetworkError(f"edge {eid!r}: source node {src!r} not declared")
        if dst not in node_set:
            raise NetworkError(f"edge {eid!r}: target node {dst!r} not declared")
        if (src, dst) in seen_pairs:
            raise NetworkError(f"edge {eid!r}: parallel edge on pair ({src!r}, {dst!r})")
        seen_pairs.add((src, dst))
        edge = Edge(src, dst, eid)
        edge_list.append(edge)
        by_id[eid] = edge
    return Network(node_tuple, tuple(edge_list), by_id)


def line_network(num_edges: int, prefix: str = "e") -> Network:
    """One-way connection line: nodes v0..vk joined by forward edges e1..ek."""
    if num_edges < 1:
        raise NetworkError("line needs at least one edge")
    nodes = [f"v{i}" for i in range(num_edges + 1)]
    edges = [(f"v{i}", f"v{i + 1}", f"{prefix}{i + 1}") for i in range(num_edges)]
    return build_network(nodes, edges)


def in_tree_network(parents: Sequence[int]) -> Network:
    """Rooted tree with every edge directed toward the root.

    ``parents[i]`` is the parent of node i+1; node 0 is the root. Edge ``ek``
    runs from node nk to its parent, so packets travel rootward.
    """
    for i, par in enumerate(parents, start=1):
        if not 0 <= par < i:
            raise NetworkError(f"parent of node {i} must lie in [0, {i - 1}], got {par}")
    nodes = [f"n{i}" for i in range(len(parents) + 1)]
    edges = [(f"n{i}", f"n{par}", f"e{i}") for i, par in enumerate(parents, start=1)]
    return build_network(nodes, edges)


@dataclass(frozen=True)
class PacketPath:
    """Fixed edge sequence a packet follows; never empty."""

    edges: tuple[EdgeId, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", tuple(self.edges))
        if not self.edges:
            raise NetworkError("packet path must contain at least one edge")

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self) -> Iterator[EdgeId]:
        return iter(self.edges)

    def __getitem__(self, i):
        return self.edges[i]


def path(*edge_ids: EdgeId) -> PacketPath:
    return PacketPath(tuple(edge_ids))


def validate_path(network: Network, p: PacketPath) -> bool:
    """True iff every edge exists and consecutive edges share a node. Never raises."""
    by_id = network.edge_by_id
    if any(e not in by_id for e in p.edges):
        return False
    for a, b in zip(p.edges, p.edges[1:]):
        if by_id[a].dst != by_id[b].src:
            return False
    return True


@dataclass(frozen=True)
class CongestionDilation:
    n: int  # max number of path crossings of any single edge
    d: int  # longest path, in edges


def congestion_dilation(packet_paths: Sequence[PacketPath]) -> CongestionDilation:
    """Congestion n and dilation d of a packet set.

    n counts edge crossings, so an edge repeated within one walk counts each
    occurrence; identical to counting paths when all paths are simple.
    """
    if not packet_paths:
        raise NetworkError("congestion/dilation undefined for an empty packet set")
    crossings: dict[EdgeId, int] = {}
    d = 0
    for p in packet_paths:
        d = max(d, len(p))
        for e in p.edges:
            crossings[e] = crossings.get(e, 0) + 1
    return CongestionDilation(n=max(crossings.values()), d=d)
