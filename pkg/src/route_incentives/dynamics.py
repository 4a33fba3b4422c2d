"""Asynchronous path-vector dynamics under Highest Reward Path selection.

A scheduler activates subsets of players round by round.  An activated
player drains its inbox, keeps the latest offer from each sender, selects
the highest-reward route and, if that selection changed, re-advertises to
its candidate children according to its strategy.  Offers are never
withdrawn.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .game import (GameSpec, History, InvalidActionError, OutcomeTree, RewardOffer,
                   _assemble, _frontier, hrp_select, play, structure)
from .strategies import StrategyProfile


@dataclass(frozen=True)
class Schedule:
    """Activation sets, grouped into fairness windows.

    ``kind`` is ``"round-robin"`` (one player per round, in id order) or
    ``"random"`` (``len(players)`` uniform non-empty subsets, then every
    player once in a shuffled order, per window).  ``explicit`` rounds, if
    given, are played first; the generated rounds follow.
    """

    players: tuple[int, ...]
    kind: str = "round-robin"
    seed: int = 0
    explicit: tuple[frozenset[int], ...] = ()

    def __post_init__(self):
        if self.kind not in ("round-robin", "random"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")

    @property
    def window(self) -> int:
        n = len(self.players)
        return n if self.kind == "round-robin" else 2 * n

    def rounds(self) -> Iterator[frozenset[int]]:
        yield from self.explicit
        rng = random.Random(self.seed)
        while True:
            if self.kind == "round-robin":
                for p in self.players:
                    yield frozenset((p,))
                continue
            for _ in range(len(self.players)):
                subset = frozenset(p for p in self.players if rng.random() < 0.5)
                while not subset:
                    subset = frozenset(p for p in self.players if rng.random() < 0.5)
                yield subset
            order = list(self.players)
            rng.shuffle(order)
            for p in order:
                yield frozenset((p,))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "seed": str(self.seed),
                "explicit": [sorted(map(str, s)) for s in self.explicit]}


@dataclass(frozen=True)
class ProtocolState:
    best: dict[int, RewardOffer | None]
    known: dict[int, dict[int, RewardOffer]]  # receiver -> sender -> latest offer
    inbox: dict[int, tuple[RewardOffer, ...]]
    sent: dict[tuple[int, int], int] = field(default_factory=dict)
    round: int = 0

    @classmethod
    def initial(cls, spec: GameSpec) -> ProtocolState:
        t = spec.topology
        d = t.destination
        inbox = {p: () for p in t.players}
        sent = {}
        for p in t.neighbors(d):
            inbox[p] = (RewardOffer(d, p, spec.r_d, (d,)),)
            sent[(d, p)] = spec.r_d
        return cls({p: None for p in t.players}, {p: {} for p in t.players}, inbox, sent)

    @property
    def quiet(self) -> bool:
        return not any(self.inbox.values())


def step(spec: GameSpec, strategies: StrategyProfile, st: ProtocolState,
         activated: Sequence[int] | frozenset[int]) -> ProtocolState:
    """Activate ``activated`` players once, in id order.

    Offers emitted in this round land in the recipients' inboxes for later
    rounds, so activation order inside a round does not matter.
    """
    t = spec.topology
    s = structure(t)
    unknown = set(activated) - set(t.players)
    if unknown:
        raise ValueError(f"not players: {sorted(unknown)}")
    best, known = dict(st.best), dict(st.known)
    inbox = {p: list(v) for p, v in st.inbox.items()}
    sent = dict(st.sent)
    outgoing: list[RewardOffer] = []
    for p in sorted(activated):
        if not inbox[p]:
            continue
        table = dict(known[p])
        for o in inbox[p]:
            table[o.sender] = o
        inbox[p] = []
        known[p] = table
        chosen = hrp_select(table.values(), spec.tiebreak, spec.cost)
        if chosen == best[p]:
            continue
        best[p] = chosen
        x = 0 if chosen is None else chosen.reward
        route = () if chosen is None else (p, *chosen.route)
        kids = t.children(p)
        if x <= spec.cost or not kids:
            move = {}
        else:
            move = strategies.act(p, x, _frontier(s, t.stages[p], p, sent))
        for c in kids:
            r = int(move.get(c, 0))
            if r < 0 or (r > 0 and r >= x):
                raise InvalidActionError(p, c, r, x)
            if sent.get((p, c), 0) != r:
                sent[(p, c)] = r
                outgoing.append(RewardOffer(p, c, r, route))
    for o in outgoing:
        inbox[o.receiver].append(o)
    return ProtocolState(best, known, {p: tuple(v) for p, v in inbox.items()}, sent, st.round + 1)


def outcome_of(spec: GameSpec, st: ProtocolState) -> OutcomeTree:
    t = spec.topology
    routes, received = {}, {}
    for p in t.players:
        o = st.best[p]
        routes[p] = () if o is None else (p, *o.route)
        received[p] = 0 if o is None else o.reward
    offers = {e: r for e, r in st.sent.items() if r > 0}
    return _assemble(spec, list(t.players), routes, received, offers)


@dataclass(frozen=True)
class RunResult:
    outcome: OutcomeTree
    converged: bool
    rounds: int
    reward_trace: tuple[dict[int, int], ...] = field(default=(), compare=False, repr=False)


def run(spec: GameSpec, strategies: StrategyProfile, sched: Schedule,
        max_rounds: int = 10_000, trace: bool = False) -> RunResult:
    """Iterate :func:`step` until a whole window passes with nothing pending."""
    if max_rounds < 1:
        raise ValueError("max_rounds must be at least 1")
    st = ProtocolState.initial(spec)
    rounds = sched.rounds()
    window = max(sched.window, 1)
    idle = 0
    history = []
    for _ in range(max_rounds):
        nxt = step(spec, strategies, st, next(rounds))
        changed = nxt.best != st.best or nxt.sent != st.sent or nxt.inbox != st.inbox
        st = nxt
        if trace:
            history.append({p: (0 if o is None else o.reward) for p, o in st.best.items()})
        idle = 0 if changed or not st.quiet else idle + 1
        if idle >= window:
            return RunResult(outcome_of(spec, st), True, st.round, tuple(history))
    return RunResult(outcome_of(spec, st), False, st.round, tuple(history))


@dataclass(frozen=True)
class ConvergenceReport:
    unanimous: bool  # every schedule converged to the cascade tree
    converged: bool  # every schedule went quiet within the round limit
    trials: int
    reference: OutcomeTree
    counterexample: Schedule | None = None  # first schedule that disagreed
    max_rounds_used: int = 0

    def __bool__(self) -> bool:
        return self.unanimous


def same_tree(a: OutcomeTree, b: OutcomeTree) -> bool:
    return a.routes == b.routes and a.received == b.received


def check_unique_convergence(spec: GameSpec, strategies: StrategyProfile, trials: int,
                             seed: int = 0, schedules: Sequence[Schedule] = ()) -> ConvergenceReport:
    """Compare ``trials`` random fair schedules (plus any given) to the stage cascade."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    reference = play(spec, strategies, History.initial(spec.topology, spec.r_d))
    players = spec.topology.players
    rng = random.Random(seed)
    plans = [Schedule(players, "random", rng.randrange(2**32)) for _ in range(trials)]
    worst, converged, bad = 0, True, None
    for sched in [*plans, *schedules]:
        res = run(spec, strategies, sched)
        worst = max(worst, res.rounds)
        converged = converged and res.converged
        if bad is None and not (res.converged and same_tree(res.outcome, reference)):
            bad = sched
    return ConvergenceReport(bad is None, converged, trials, reference, bad, worst)


def leaf_first(spec: GameSpec) -> Schedule:
    """Round-robin that starts from the deepest players and works inwards."""
    t = spec.topology
    order = sorted(t.players, key=lambda p: (-t.stages[p], p))
    return Schedule(t.players, "round-robin", 0, tuple(frozenset((p,)) for p in order))
