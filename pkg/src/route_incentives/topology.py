"""Graph model for the route distribution game.

A :class:`Topology` is an undirected simple graph with one distinguished
destination node (the advertiser).  Every other node is a player.  Players
are assigned to stages by hop distance from the destination; offers only
travel from stage ``k`` to stage ``k + 1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable

import networkx as nx


class TopologyError(ValueError):
    """Raised for malformed or unsupported graphs."""


@dataclass(frozen=True)
class Topology:
    nodes: frozenset[int]
    destination: int
    edges: frozenset[frozenset[int]]

    def __post_init__(self):
        if self.destination not in self.nodes:
            raise TopologyError(f"destination {self.destination} is not a node")
        for e in self.edges:
            if len(e) != 2:
                raise TopologyError(f"self-loop or malformed edge {sorted(e)}")
            if not e <= self.nodes:
                raise TopologyError(f"edge {sorted(e)} references unknown node")
        if not any(self.destination in e for e in self.edges):
            raise TopologyError("destination has no neighbor")
        if not nx.is_connected(self.graph):
            raise TopologyError("graph is disconnected")

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]], destination: int = 0,
                   nodes: Iterable[int] | None = None) -> Topology:
        edge_list = [(int(a), int(b)) for a, b in edges]
        seen: set[frozenset[int]] = set()
        for a, b in edge_list:
            if a == b:
                raise TopologyError(f"self-loop at node {a}")
            key = frozenset((a, b))
            if key in seen:
                raise TopologyError(f"duplicate edge {a}-{b}")
            seen.add(key)
        node_set = {n for e in edge_list for n in e} | {destination}
        if nodes is not None:
            node_set |= {int(n) for n in nodes}
        return cls(frozenset(node_set), int(destination), frozenset(seen))

    @cached_property
    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.nodes)
        g.add_edges_from(tuple(e) for e in self.edges)
        return g

    @cached_property
    def players(self) -> tuple[int, ...]:
        return tuple(sorted(self.nodes - {self.destination}))

    def neighbors(self, node: int) -> tuple[int, ...]:
        return tuple(sorted(self.graph.neighbors(node)))

    @cached_property
    def stages(self) -> dict[int, int]:
        """Hop distance from the destination for every player."""
        dist = nx.single_source_shortest_path_length(self.graph, self.destination)
        return {p: dist[p] for p in self.players}

    @cached_property
    def depth(self) -> int:
        return max(self.stages.values(), default=0)

    def stage_of(self, node: int) -> int:
        return 0 if node == self.destination else self.stages[node]

    def parents(self, player: int) -> tuple[int, ...]:
        k = self.stage_of(player)
        return tuple(n for n in self.neighbors(player) if self.stage_of(n) == k - 1)

    def children(self, node: int) -> tuple[int, ...]:
        """Candidate neighbors: the neighbors one stage further out."""
        k = self.stage_of(node)
        return tuple(n for n in self.neighbors(node)
                     if n != self.destination and self.stage_of(n) == k + 1)

    def players_at(self, stage: int) -> tuple[int, ...]:
        return tuple(p for p in self.players if self.stages[p] == stage)

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "nodes": [str(n) for n in sorted(self.nodes)],
            "destination": str(self.destination),
            "edges": [[str(a), str(b)] for a, b in sorted(sorted(e) for e in self.edges)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> Topology:
        try:
            return cls.from_edges(
                [(a, b) for a, b in data["edges"]],
                destination=int(data["destination"]),
                nodes=data.get("nodes", ()),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, TopologyError):
                raise
            raise TopologyError(f"bad topology document: {exc}") from exc

    @classmethod
    def load(cls, path: str | Path) -> Topology:
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class TopologyInfo:
    shape: str  # line | tree | ring | general
    depth: int
    stages: dict[int, int] = field(hash=False)


def _is_line(t: Topology) -> bool:
    g = t.graph
    return (nx.is_tree(g) and g.degree(t.destination) == 1
            and all(d <= 2 for _, d in g.degree()))


def _is_even_cycle(t: Topology) -> bool:
    g = t.graph
    return (len(g) >= 4 and len(g) % 2 == 0
            and all(d == 2 for _, d in g.degree()))


def validate_topology(t: Topology, expect: str | None = None) -> TopologyInfo:
    """Classify ``t`` as line, tree, ring or general.

    ``expect`` names the shape the caller requires; a mismatch raises
    :class:`TopologyError`.  An odd cycle is never a ring.
    """
    g = t.graph
    if _is_line(t):
        shape = "line"
    elif nx.is_tree(g):
        shape = "tree"
    elif _is_even_cycle(t):
        shape = "ring"
    else:
        shape = "general"
    if expect is not None:
        ok = shape == expect or (expect == "tree" and shape == "line")
        if not ok:
            if expect == "ring" and all(d == 2 for _, d in g.degree()):
                raise TopologyError(f"odd cycle of {len(g)} nodes is not a ring")
            raise TopologyError(f"expected a {expect}, got a {shape} graph")
    return TopologyInfo(shape, t.depth, dict(t.stages))


# -- builders ------------------------------------------------------------

def line(k: int, destination: int = 0) -> Topology:
    """Path ``d - 1 - 2 - ... - k``; player ``i`` plays at stage ``i``."""
    if k < 1:
        raise TopologyError("a line needs at least one player")
    nodes = [destination, *range(1, k + 1)]
    return Topology.from_edges(zip(nodes, nodes[1:]), destination)


def ring(k: int, destination: int = 0) -> Topology:
    """Even cycle with ``2k - 1`` players, ``k`` stages.

    Players ``2j - 1`` (left) and ``2j`` (right) play at stage ``j``; the last
    player ``2k - 1`` closes the cycle and has both ``2k - 3`` and ``2k - 2``
    as parents.
    """
    if k < 2:
        raise TopologyError("a ring needs at least two stages")
    last = 2 * k - 1
    edges = [(destination, 1), (destination, 2)]
    for j in range(1, k - 1):
        edges += [(2 * j - 1, 2 * j + 1), (2 * j, 2 * j + 2)]
    edges += [(last - 2, last), (last - 1, last)]
    return Topology.from_edges(edges, destination)


def star(n: int, destination: int = 0) -> Topology:
    return Topology.from_edges([(destination, i) for i in range(1, n + 1)], destination)


def balanced_tree(branching: int, depth: int, destination: int = 0) -> Topology:
    """Complete tree rooted at the destination, players numbered breadth-first."""
    edges = []
    frontier = [destination]
    nxt = 1
    for _ in range(depth):
        new = []
        for parent in frontier:
            for _ in range(branching):
                edges.append((parent, nxt))
                new.append(nxt)
                nxt += 1
        frontier = new
    return Topology.from_edges(edges, destination)
