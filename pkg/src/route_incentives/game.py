"""Game data model, Highest Reward Path selection and the stage cascade.

Utilities follow the linear sales model: a participant ``i`` that accepted
reward ``x`` earns ``x - c`` for participating plus ``(x - r_ij) * (delta_j + 1)``
for every child ``j`` that routes through it.  All arithmetic is on Python
integers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple

import networkx as nx

from .strategies import FixedActions, Frontier, StrategyProfile
from .topology import Topology

COST = 1


class TieBreak(str, Enum):
    """Consistent rule for choosing among equal-reward offers."""

    LOWEST_ID = "lowest-id"
    HIGHEST_ID = "highest-id"
    PREFER_LEFT = "prefer-left"  # odd sender ids first, then lowest id
    PREFER_RIGHT = "prefer-right"  # even sender ids first, then lowest id

    def rank(self, sender: int) -> tuple:
        if self is TieBreak.LOWEST_ID:
            return (sender,)
        if self is TieBreak.HIGHEST_ID:
            return (-sender,)
        if self is TieBreak.PREFER_LEFT:
            return (sender % 2 == 0, sender)
        return (sender % 2 == 1, sender)


class InvalidActionError(ValueError):
    def __init__(self, player: int, child: int, reward: int, incoming: int):
        self.player = player
        self.child = child
        self.reward = reward
        self.incoming = incoming
        super().__init__(
            f"player {player} offers {reward} to {child} but accepted only {incoming}")


@dataclass(frozen=True)
class GameSpec:
    topology: Topology
    r_d: int
    cost: int = COST
    tiebreak: TieBreak = TieBreak.LOWEST_ID

    def __post_init__(self):
        if self.cost != COST:
            raise ValueError("only unit participation cost is supported")
        if int(self.r_d) != self.r_d or self.r_d < 0:
            raise ValueError("r_d must be a non-negative integer")
        object.__setattr__(self, "tiebreak", TieBreak(self.tiebreak))

    def with_rd(self, r_d: int) -> GameSpec:
        return GameSpec(self.topology, r_d, self.cost, self.tiebreak)


@dataclass(frozen=True)
class RewardOffer:
    sender: int
    receiver: int
    reward: int
    route: tuple[int, ...] = ()  # sender ... destination


def hrp_select(offers: Iterable[RewardOffer], tiebreak: TieBreak = TieBreak.LOWEST_ID,
               cost: int = COST) -> RewardOffer | None:
    """Pick the highest-reward offer worth accepting (reward >= cost)."""
    tiebreak = TieBreak(tiebreak)
    best = None
    for o in offers:
        if o.reward < cost:
            continue
        if (best is None or o.reward > best.reward
                or (o.reward == best.reward and tiebreak.rank(o.sender) < tiebreak.rank(best.sender))):
            best = o
    return best


@dataclass(frozen=True)
class History:
    """Compact history at the start of ``stage``.

    ``offers`` holds the rewards on the edges into stage ``stage`` (a zero or
    missing entry means no offer).  Play before the frontier does not
    affect anyone downstream, so it is not kept.
    """

    stage: int
    offers: Mapping[tuple[int, int], int] = field(hash=False)

    @classmethod
    def initial(cls, topology: Topology, r_d: int) -> History:
        d = topology.destination
        return cls(1, {(d, p): r_d for p in topology.neighbors(d)})

    @property
    def key(self) -> tuple:
        return (self.stage, tuple(sorted(self.offers.items())))


class Utility(NamedTuple):
    participation: int
    profit: int

    @property
    def total(self) -> int:
        return self.participation + self.profit


@dataclass(frozen=True)
class OutcomeTree:
    """Result of one play: who routes through whom, and what it is worth.

    Routes run from the player towards the destination.  For a subgame
    started mid-tree they stop at the frontier sender.
    """

    routes: dict[int, tuple[int, ...]]
    received: dict[int, int]
    offers: dict[tuple[int, int], int]
    delta: dict[int, int]
    utilities: dict[int, Utility]

    @property
    def players(self) -> tuple[int, ...]:
        return tuple(sorted(self.routes))

    @property
    def participants(self) -> tuple[int, ...]:
        return tuple(p for p in self.players if self.routes[p])

    def participates(self, player: int) -> bool:
        return bool(self.routes[player])

    def parent(self, player: int) -> int | None:
        r = self.routes[player]
        return r[1] if r else None

    def children(self, player: int) -> tuple[int, ...]:
        return tuple(p for p in self.players if self.parent(p) == player)

    @property
    def spanning(self) -> bool:
        return all(self.routes.values())

    def edges(self) -> list[tuple[int, int]]:
        return [(self.parent(p), p) for p in self.participants]

    def to_dict(self) -> dict:
        return {
            "routes": {str(p): [str(n) for n in r] for p, r in self.routes.items()},
            "received": {str(p): str(x) for p, x in self.received.items()},
            "delta": {str(p): str(x) for p, x in self.delta.items()},
            "utility": {str(p): str(u.total) for p, u in self.utilities.items()},
            "spanning": self.spanning,
        }

    def to_dot(self, destination: int | None = None) -> str:
        lines = ["digraph outcome {"]
        if destination is not None:
            lines.append(f'  {destination} [label="d", shape=doublecircle];')
        for p in self.players:
            style = "" if self.participates(p) else ", style=dashed"
            lines.append(f'  {p} [label="{p}\\ndelta={self.delta[p]}\\nu={self.utilities[p].total}"{style}];')
        for parent, child in self.edges():
            lines.append(f'  {parent} -> {child} [label="{self.received[child]}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


# -- structure shared by every play on a topology ---------------------------

@dataclass(frozen=True)
class _Structure:
    topology: Topology
    # (stage, player) -> frozenset of players in its downstream component
    component: dict[tuple[int, int], frozenset[int]] = field(hash=False)
    # (stage, component) -> sorted frontier edges into that component
    frontier_edges: dict[tuple[int, frozenset[int]], tuple[tuple[int, int], ...]] = field(hash=False)


@lru_cache(maxsize=256)
def structure(topology: Topology) -> _Structure:
    t = topology
    component, frontier_edges = {}, {}
    for k in range(1, t.depth + 1):
        g = nx.Graph()
        members = [p for p in t.players if t.stages[p] >= k]
        g.add_nodes_from(members)
        g.add_edges_from((p, c) for p in members for c in t.children(p))
        for comp in nx.connected_components(g):
            comp = frozenset(comp)
            for p in comp:
                component[(k, p)] = comp
            edges = sorted((s, p) for p in comp if t.stages[p] == k for s in t.parents(p))
            frontier_edges[(k, comp)] = tuple(edges)
    return _Structure(t, component, frontier_edges)


def subgame_players(topology: Topology, history: History) -> frozenset[int]:
    st = structure(topology)
    out: set[int] = set()
    for (_, receiver) in history.offers:
        out |= st.component[(history.stage, receiver)]
    return frozenset(out)


def _frontier(st: _Structure, stage: int, player: int,
              offers: Mapping[tuple[int, int], int]) -> Frontier:
    comp = st.component[(stage, player)]
    edges = st.frontier_edges[(stage, comp)]
    return Frontier(stage, edges, tuple(offers.get(e, 0) for e in edges))


def play(spec: GameSpec, profile: StrategyProfile, history: History | None = None,
         actions: Mapping[int, Mapping[int, int]] | None = None,
         routes: Mapping[int, object] | None = None) -> OutcomeTree:
    """Run the fixed-schedule cascade from ``history`` (default: ``h^1``).

    ``actions`` overrides the moves of the named players; ``routes`` forces
    a player to accept the offer of the given sender (``None`` to decline)
    instead of the HRP choice.  Both exist for deviation analysis.
    """
    t = spec.topology
    st = structure(t)
    if history is None:
        history = History.initial(t, spec.r_d)
    actions = actions or {}
    routes_forced = routes or {}
    members = subgame_players(t, history)
    offers = {e: r for e, r in history.offers.items() if r > 0}
    route: dict[int, tuple[int, ...]] = {}
    received: dict[int, int] = {}
    d = t.destination

    for k in range(history.stage, t.depth + 1):
        movers = [p for p in t.players_at(k) if p in members]
        for p in movers:
            candidates = [RewardOffer(s, p, offers.get((s, p), 0)) for s in t.parents(p)]
            if p in routes_forced:
                forced = routes_forced[p]
                chosen = next((o for o in candidates if o.sender == forced and o.reward >= spec.cost),
                              None)
            else:
                chosen = hrp_select(candidates, spec.tiebreak, spec.cost)
            if chosen is None:
                route[p], received[p] = (), 0
                continue
            s = chosen.sender
            above = (d,) if s == d else route.get(s, (s,))
            route[p], received[p] = (p, *above), chosen.reward
        for p in movers:
            x = received[p]
            kids = t.children(p)
            if p in actions:
                move = actions[p]
            elif x <= spec.cost or not kids:
                continue
            else:
                move = profile.act(p, x, _frontier(st, k, p, offers))
            for c, r in move.items():
                r = int(r)
                if c not in kids or r < 0 or (r > 0 and r >= x):
                    raise InvalidActionError(p, c, r, x)
                if r > 0:
                    offers[(p, c)] = r

    return _assemble(spec, sorted(members), route, received, offers)


def _assemble(spec: GameSpec, players, route, received, offers) -> OutcomeTree:
    t = spec.topology
    kids: dict[int, list[int]] = {p: [] for p in players}
    for p in players:
        r = route[p]
        if r and r[1] in kids:
            kids[r[1]].append(p)
    delta: dict[int, int] = {}
    for p in sorted(players, key=lambda q: -t.stages[q]):
        delta[p] = sum(delta[j] + 1 for j in kids[p])
    utilities = {}
    for p in players:
        if not route[p]:
            utilities[p] = Utility(0, 0)
            continue
        x = received[p]
        profit = sum((x - offers[(p, j)]) * (delta[j] + 1) for j in kids[p])
        utilities[p] = Utility(x - spec.cost, profit)
    return OutcomeTree(
        routes={p: route[p] for p in players},
        received={p: received[p] for p in players},
        offers=dict(sorted(offers.items())),
        delta={p: delta[p] for p in players},
        utilities=utilities,
    )


def normalize_actions(topology: Topology,
                      actions: Mapping[int, Mapping[int, int] | int]) -> dict[int, dict[int, int]]:
    """Expand shorthand ``{player: reward}`` to ``{player: {child: reward}}``."""
    out = {}
    for p, a in actions.items():
        if isinstance(a, Mapping):
            out[int(p)] = {int(c): int(r) for c, r in a.items()}
        else:
            out[int(p)] = {c: int(a) for c in topology.children(int(p))}
    return out


def outcome_from_actions(spec: GameSpec,
                         actions: Mapping[int, Mapping[int, int] | int]) -> OutcomeTree:
    """Play a fixed action profile through the stage cascade.

    Every listed offer is checked against what its sender actually
    accepted, including players that end up not participating.
    """
    fixed = normalize_actions(spec.topology, actions)
    outcome = play(spec, FixedActions(fixed))
    for p, move in fixed.items():
        x = outcome.received.get(p, 0)
        for c, r in move.items():
            if r > 0 and r >= x:
                raise InvalidActionError(p, c, r, x)
    return outcome


def utility(spec: GameSpec, outcome: OutcomeTree, player: int) -> Utility:
    if player not in spec.topology.players:
        raise KeyError(f"{player} is not a player")
    return outcome.utilities[player]
