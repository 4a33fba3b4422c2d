"""Nash and subgame-perfect verification for the fixed-schedule game.

Each player moves exactly once, at the history its stage reaches.  A
unilateral change of strategy therefore only matters at that one history,
so checking every alternative *action* there is the same as checking every
alternative *strategy*.  Downstream players keep their strategies and
respond to the deviation as those strategies dictate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from .game import GameSpec, History, OutcomeTree, play, structure
from .strategies import StrategyProfile
from .topology import Topology


@dataclass(frozen=True)
class Deviation:
    player: int
    action: dict[int, int]
    before: int
    after: int
    route: int | None = None  # sender accepted instead of the HRP choice

    @property
    def gain(self) -> int:
        return self.after - self.before

    def to_dict(self) -> dict:
        out = {
            "player": str(self.player),
            "action": {str(c): str(r) for c, r in self.action.items()},
            "utility_before": str(self.before),
            "utility_after": str(self.after),
            "gain": str(self.gain),
        }
        if self.route is not None:
            out["route_via"] = str(self.route)
        return out


@dataclass(frozen=True)
class NashCheck:
    ok: bool
    history: History
    witness: Deviation | None = None

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict:
        return {
            "equilibrium": self.ok,
            "history": _history_dict(self.history),
            "witness": None if self.witness is None else self.witness.to_dict(),
        }


def _history_dict(h: History) -> dict:
    return {
        "stage": str(h.stage),
        "offers": [[str(s), str(r), str(v)] for (s, r), v in sorted(h.offers.items())],
    }


def stages(topology: Topology) -> dict[int, int]:
    """Stage of every player: hop distance from the destination."""
    return dict(topology.stages)


def action_space(topology: Topology, player: int, incoming: int) -> Iterator[dict[int, int]]:
    """All reward vectors available after accepting ``incoming``.

    Each child gets 0 (no offer) or a reward strictly below ``incoming``.
    """
    kids = topology.children(player)
    top = max(incoming, 1)
    for combo in itertools.product(range(top), repeat=len(kids)):
        yield dict(zip(kids, combo))


def _current_action(outcome: OutcomeTree, topology: Topology, player: int) -> dict[int, int]:
    return {c: outcome.offers.get((player, c), 0) for c in topology.children(player)}


def is_nash(spec: GameSpec, profile: StrategyProfile, at: History | None = None) -> NashCheck:
    """Check that no player in the subgame ``G(at)`` gains by a one-action deviation.

    Returns the first strictly profitable deviation found, scanning players
    in stage order and actions in lexicographic order.
    """
    t = spec.topology
    at = at or History.initial(t, spec.r_d)
    base = play(spec, profile, at)
    for p in sorted(base.players, key=lambda q: (t.stages[q], q)):
        x = base.received[p]
        if x <= spec.cost or not t.children(p):
            continue
        current = _current_action(base, t, p)
        before = base.utilities[p].total
        for alt in action_space(t, p, x):
            if alt == current:
                continue
            after = play(spec, profile, at, actions={p: alt}).utilities[p].total
            if after > before:
                return NashCheck(False, at, Deviation(p, alt, before, after))
    return NashCheck(True, at)


def responses(spec: GameSpec, profile: StrategyProfile, player: int,
              at: History | None = None) -> list[tuple[int, int | None, dict[int, int]]]:
    """Every (utility, accepted sender, action) available to ``player``.

    Includes accepting any positive offer (not just the HRP one) and
    declining altogether (sender ``None``, utility 0).  Others follow
    ``profile``.
    """
    t = spec.topology
    at = at or History.initial(t, spec.r_d)
    base = play(spec, profile, at)
    k = t.stages[player]
    if k == at.stage:
        offered = {s: at.offers.get((s, player), 0) for s in t.parents(player)}
    else:
        offered = {s: base.offers.get((s, player), 0) for s in t.parents(player)}
    out = [(0, None, {c: 0 for c in t.children(player)})]
    for sender, reward in sorted(offered.items()):
        if reward < spec.cost:
            continue
        for alt in action_space(t, player, reward):
            o = play(spec, profile, at, actions={player: alt}, routes={player: sender})
            out.append((o.utilities[player].total, sender, alt))
    return out


@dataclass(frozen=True)
class SPECheck:
    ok: bool
    checked: int
    failure: NashCheck | None = None

    def __bool__(self) -> bool:
        return self.ok

    @property
    def history(self) -> History | None:
        return None if self.failure is None else self.failure.history

    @property
    def witness(self) -> Deviation | None:
        return None if self.failure is None else self.failure.witness

    def to_dict(self) -> dict:
        return {
            "equilibrium": self.ok,
            "subgames_checked": str(self.checked),
            "failure": None if self.failure is None else self.failure.to_dict(),
        }


def histories(spec: GameSpec) -> Iterator[History]:
    """``h^1`` followed by every frontier assignment at every later stage.

    Frontier rewards range over ``0..r_d`` independently, one subgame per
    downstream component.
    """
    t = spec.topology
    yield History.initial(t, spec.r_d)
    st = structure(t)
    for (k, comp), edges in sorted(st.frontier_edges.items(),
                                   key=lambda kv: (kv[0][0], min(kv[0][1]))):
        if k == 1:
            continue
        for values in itertools.product(range(spec.r_d + 1), repeat=len(edges)):
            yield History(k, dict(zip(edges, values)))


def is_subgame_perfect(spec: GameSpec, profile: StrategyProfile) -> SPECheck:
    n = 0
    for h in histories(spec):
        n += 1
        check = is_nash(spec, profile, h)
        if not check:
            return SPECheck(False, n, check)
    return SPECheck(True, n)
