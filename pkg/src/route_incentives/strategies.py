"""Strategy profiles for the fixed-schedule game.

A player at stage ``k`` moves once.  Its move is a reward vector, one
entry per candidate child, and may depend on what it has observed:

* ``incoming`` -- the reward on the route it selected (0 if it declined),
* ``frontier`` -- every offer made into its downstream component at stage
  ``k``.  On a ring this is the pair of rewards the two competing parents
  received; on a tree it is just the player's own offer.

Players with ``incoming <= 1`` have a single legal move (offer nothing), so
profiles are never consulted for them.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Mapping

Action = Mapping[int, int]


class IncompleteStrategyError(KeyError):
    """A profile has no entry for a history that was reached."""


@dataclass(frozen=True)
class Frontier:
    """Offers into one downstream component at one stage."""

    stage: int
    edges: tuple[tuple[int, int], ...]
    rewards: tuple[int, ...]

    def get(self, sender: int, receiver: int) -> int:
        return self.rewards[self.edges.index((sender, receiver))]

    @property
    def key(self) -> tuple[int, ...]:
        return self.rewards


class StrategyProfile(ABC):
    """Maps each player's observation to the rewards it offers its children."""

    @abstractmethod
    def act(self, player: int, incoming: int, frontier: Frontier) -> Action:
        ...

    def to_dict(self) -> dict:
        raise TypeError(f"{type(self).__name__} is not serializable")


def _encode_action(action: Action) -> dict[str, str]:
    return {str(c): str(r) for c, r in sorted(action.items())}


def _decode_action(data: Mapping[str, object]) -> dict[int, int]:
    return {int(c): int(r) for c, r in data.items()}


@dataclass
class LocalProfile(StrategyProfile):
    """Tabular strategies keyed by the player's own incoming reward."""

    tables: dict[int, dict[int, dict[int, int]]]

    def act(self, player, incoming, frontier):
        try:
            return self.tables[player][incoming]
        except KeyError:
            raise IncompleteStrategyError(
                f"player {player} has no move for incoming reward {incoming}") from None

    def on_path(self, player: int, incoming: int) -> dict[int, int]:
        return dict(self.tables.get(player, {}).get(incoming, {}))

    def to_dict(self) -> dict:
        return {
            "kind": "local",
            "players": {
                str(p): {str(x): _encode_action(a) for x, a in sorted(tab.items())}
                for p, tab in sorted(self.tables.items())
            },
        }


@dataclass
class FrontierProfile(StrategyProfile):
    """Tabular strategies keyed by the whole frontier of the player's component."""

    tables: dict[int, dict[tuple[int, ...], dict[int, int]]]

    def act(self, player, incoming, frontier):
        try:
            return self.tables[player][frontier.key]
        except KeyError:
            raise IncompleteStrategyError(
                f"player {player} has no move for frontier {frontier.key}") from None

    def to_dict(self) -> dict:
        return {
            "kind": "frontier",
            "players": {
                str(p): {",".join(map(str, key)): _encode_action(a)
                         for key, a in sorted(tab.items())}
                for p, tab in sorted(self.tables.items())
            },
        }


@dataclass
class FunctionProfile(StrategyProfile):
    """Wraps ``fn(player, incoming, frontier) -> action``."""

    fn: Callable[[int, int, Frontier], Action]

    def act(self, player, incoming, frontier):
        return self.fn(player, incoming, frontier)


@dataclass
class FixedActions(StrategyProfile):
    """History-independent actions.

    With ``clamp`` set, each offer is cut to ``incoming - 1`` so the profile
    is legal after any upstream change; otherwise the stored offers are
    returned verbatim and the engine rejects illegal ones.
    """

    actions: dict[int, dict[int, int]]
    clamp: bool = False

    def act(self, player, incoming, frontier):
        action = self.actions.get(player, {})
        if self.clamp:
            return {c: min(r, incoming - 1) for c, r in action.items()}
        return action

    def to_dict(self) -> dict:
        return {
            "kind": "fixed",
            "clamp": self.clamp,
            "players": {str(p): _encode_action(a) for p, a in sorted(self.actions.items())},
        }


def profile_from_dict(data: Mapping) -> StrategyProfile:
    kind = data.get("kind")
    players = data.get("players", {})
    if kind == "local":
        return LocalProfile({
            int(p): {int(x): _decode_action(a) for x, a in tab.items()}
            for p, tab in players.items()
        })
    if kind == "frontier":
        return FrontierProfile({
            int(p): {tuple(int(v) for v in key.split(",")) if key else (): _decode_action(a)
                     for key, a in tab.items()}
            for p, tab in players.items()
        })
    if kind == "fixed":
        return FixedActions({int(p): _decode_action(a) for p, a in players.items()},
                            clamp=bool(data.get("clamp", False)))
    raise ValueError(f"unknown profile kind {kind!r}")
