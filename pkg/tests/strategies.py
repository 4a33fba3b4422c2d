"""Hypothesis generators shared by the test modules."""

from __future__ import annotations

from hypothesis import strategies as st

from route_incentives.topology import Topology


@st.composite
def topologies(draw, max_nodes: int = 7, trees_only: bool = False):
    """Random connected graph on ``0..n-1`` with destination 0."""
    n = draw(st.integers(2, max_nodes))
    edges = {frozenset((i, draw(st.integers(0, i - 1)))) for i in range(1, n)}
    if not trees_only:
        pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
        extra = draw(st.lists(st.sampled_from(pairs), max_size=n))
        edges |= {frozenset(p) for p in extra}
    return Topology.from_edges([tuple(e) for e in edges], destination=0)


@st.composite
def fixed_actions(draw, topology: Topology, max_reward: int):
    """Arbitrary reward per (player, child) edge, to be clamped by the engine user."""
    out = {}
    for p in topology.players:
        out[p] = {c: draw(st.integers(0, max_reward)) for c in topology.children(p)}
    return out
