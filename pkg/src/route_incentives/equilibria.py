"""Equilibrium constructions and the incentive growth function.

``growth_f(k)`` is the smallest reward the destination must promise so
that a depth-``k`` line (or ring) has an equilibrium whose outcome reaches
every player.  It satisfies ``f(k) = (k-1) f(k-1) - (k-2) f(k-2)`` and
``f(k) - f(k-1) = (k-2)!``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

from .game import GameSpec, History, TieBreak, hrp_select, RewardOffer, structure
from .strategies import LocalProfile
from .topology import Topology, TopologyError, line, ring, validate_topology


def growth_f(k: int) -> int:
    if k < 0:
        raise ValueError("k must be non-negative")
    if k <= 2:
        return k
    prev2, prev = 1, 2
    for j in range(3, k + 1):
        prev2, prev = prev, (j - 1) * prev - (j - 2) * prev2
    return prev


@dataclass(frozen=True)
class GrowthRow:
    k: int
    f: int
    diff: int | None  # f(k) - f(k-1)
    factorial: int | None  # (k-2)!


def growth_table(max_k: int) -> list[GrowthRow]:
    rows = []
    for k in range(max_k + 1):
        f = growth_f(k)
        diff = f - growth_f(k - 1) if k >= 1 else None
        fact = math.factorial(k - 2) if k >= 2 else None
        rows.append(GrowthRow(k, f, diff, fact))
    return rows


# -- backward induction on trees -------------------------------------------

def _tree_tables(topology: Topology, max_reward: int) -> dict[int, dict[int, dict[int, int]]]:
    """Backward-induction tables for every player of a tree.

    ``reach[p][y]`` is the number of players in ``p``'s subtree that
    participate when ``p`` is offered ``y``.  A player receiving ``x``
    offers each child the ``y < x`` maximising ``(x - y) * reach[child][y]``;
    ties go to the larger ``y`` so that propagation reaches as deep as the
    reward allows.
    """
    t = topology
    reach: dict[int, list[int]] = {}
    tables: dict[int, dict[int, dict[int, int]]] = {}
    for p in sorted(t.players, key=lambda q: -t.stages[q]):
        kids = t.children(p)
        best = {c: [0] * (max_reward + 1) for c in kids}
        for c in kids:
            for x in range(2, max_reward + 1):
                best[c][x] = max(range(x), key=lambda y: ((x - y) * reach[c][y], y))
        tables[p] = {x: {c: best[c][x] for c in kids} for x in range(max_reward + 1)}
        reach[p] = [0] + [1 + sum(reach[c][best[c][x]] for c in kids)
                          for x in range(1, max_reward + 1)]
    return tables


def build_tree_spe(r_d: int, topology: Topology) -> LocalProfile:
    """Subgame-perfect profile for a tree rooted at the destination."""
    validate_topology(topology, expect="tree")
    return LocalProfile(_tree_tables(topology, r_d))


def build_line_spe(r_d: int, k: int) -> LocalProfile:
    """Subgame-perfect profile for the line ``d - 1 - ... - k``."""
    return build_tree_spe(r_d, line(k))


def _chain_tables(chain: list[int], max_reward: int,
                  tail: int | None = None) -> dict[int, dict[int, dict[int, int]]]:
    """Line tables for ``chain``; the last member offers ``tail`` nothing."""
    sub = line(len(chain))
    tabs = _tree_tables(sub, max_reward)
    out = {}
    for i, p in enumerate(chain, start=1):
        if i < len(chain):
            out[p] = {x: {chain[i]: a[i + 1]} for x, a in tabs[i].items()}
        elif tail is not None:
            out[p] = {x: {tail: 0} for x in range(max_reward + 1)}
        else:
            out[p] = {x: {} for x in range(max_reward + 1)}
    return out


def build_ring2_ne(r_d: int) -> LocalProfile:
    """Both stage-1 players of the 2-stage ring bid ``r_d - 1`` (0 if r_d <= 1)."""
    bid = lambda x: x - 1 if x > 1 else 0  # noqa: E731
    tables = {p: {x: {3: bid(x)} for x in range(r_d + 1)} for p in (1, 2)}
    tables[3] = {x: {} for x in range(r_d + 1)}
    return LocalProfile(tables)


@dataclass(frozen=True)
class RingSpecial:
    k: int
    r_d: int
    profile: LocalProfile

    def on_path(self) -> dict[int, int]:
        """Bid of every non-leaf player along the equilibrium path."""
        bids = {}
        for j in range(1, self.k):
            bids[2 * j - 1] = growth_f(self.k - j)
            bids[2 * j] = growth_f(self.k - j - 1)
        return bids


def build_ring_special(k: int, max_reward: int | None = None) -> RingSpecial:
    """Equilibrium of the ``k``-stage ring subgame at ``r_d = f(k)``.

    On path, stage-``j`` players bid ``f(k-j)`` (left) and ``f(k-j-1)``
    (right) and the last player takes the left route.  Off path each branch
    plays backward induction as if it were a line; the right branch never
    bids for the shared last player.  Tables cover incoming rewards up to
    ``max_reward`` (default ``f(k)``).
    """
    if k <= 2:
        raise ValueError("the special subgame needs k > 2 stages")
    r_d = growth_f(k)
    last = 2 * k - 1
    left = list(range(1, last + 1, 2))
    right = list(range(2, last, 2))
    top = max(r_d, max_reward or 0)
    tables = _chain_tables(left, top)
    tables.update(_chain_tables(right, top, tail=last))
    return RingSpecial(k, r_d, LocalProfile(tables))


# -- brute-force minimum incentive -----------------------------------------

def _equilibrium_summaries(spec: GameSpec, continuation: str = "favorable"):
    """Memoised set of subgame-perfect continuation summaries per subgame.

    A summary for a subgame starting at stage ``k`` in component ``C`` is
    ``(links, spanning)``: ``links`` gives, for every stage-``k`` player of
    ``C``, the accepted sender and its downstream count; ``spanning`` says
    whether everyone in ``C`` participates.

    ``continuation`` fixes which equilibrium of the subgame a deviation
    leads to.  ``"favorable"``: the one the deviator likes best, i.e.
    indifferent downstream players resolve ties the deviator's way.
    ``"punishing"``: the one it likes least.  On the equilibrium path any
    continuation equilibrium may be selected.
    """
    if continuation not in ("favorable", "punishing"):
        raise ValueError(f"unknown continuation rule {continuation!r}")
    pick = max if continuation == "favorable" else min
    t = spec.topology
    st = structure(t)
    cost = spec.cost

    @lru_cache(maxsize=None)
    def solve(k: int, comp: frozenset[int], rewards: tuple[int, ...]) -> frozenset:
        edges = st.frontier_edges[(k, comp)]
        offered = dict(zip(edges, rewards))
        movers = sorted(p for p in comp if t.stages[p] == k)
        parent, x = {}, {}
        for p in movers:
            o = hrp_select([RewardOffer(s, p, offered.get((s, p), 0)) for s in t.parents(p)],
                           spec.tiebreak, cost)
            parent[p] = None if o is None else o.sender
            x[p] = 0 if o is None else o.reward
        nxt = [p for p in comp if t.stages[p] == k + 1]
        sub_comps = sorted({st.component[(k + 1, q)] for q in nxt}, key=min)

        kid_lists = {p: t.children(p) for p in movers}
        spaces = []
        for p in movers:
            top = x[p] if x[p] > cost else 1
            spaces.append(list(itertools.product(range(top), repeat=len(kid_lists[p]))))

        def continuation(joint):
            offers = {}
            for p, a in zip(movers, joint):
                for c, r in zip(kid_lists[p], a):
                    if r > 0:
                        offers[(p, c)] = r
            per_comp = []
            for sc in sub_comps:
                sub_edges = st.frontier_edges[(k + 1, sc)]
                res = solve(k + 1, sc, tuple(offers.get(e, 0) for e in sub_edges))
                if not res:
                    return None
                per_comp.append(res)
            merged = []
            for combo in itertools.product(*per_comp):
                links = {}
                span = True
                for lk, sp in combo:
                    links.update(dict(lk))
                    span = span and sp
                merged.append((links, span))
            return merged

        def utilities(joint, links):
            us, deltas = [], []
            for p, a in zip(movers, joint):
                if parent[p] is None:
                    us.append(0)
                    deltas.append(0)
                    continue
                u, dl = x[p] - cost, 0
                for c, r in zip(kid_lists[p], a):
                    acc, dc = links[c]
                    if acc == p:
                        u += (x[p] - r) * (dc + 1)
                        dl += dc + 1
                us.append(u)
                deltas.append(dl)
            return us, deltas

        joints = list(itertools.product(*spaces))
        table = {}
        for joint in joints:
            cont = continuation(joint)
            if cont is None:
                return frozenset()
            table[joint] = [(utilities(joint, links), links, span) for links, span in cont]

        def punishment(i, joint):
            return pick(us[i] for (us, _), _, _ in table[joint])

        out = set()
        for joint in joints:
            for (us, deltas), links, span in table[joint]:
                stable = True
                for i in range(len(movers)):
                    for alt in spaces[i]:
                        if alt == joint[i]:
                            continue
                        dev = joint[:i] + (alt,) + joint[i + 1:]
                        if punishment(i, dev) > us[i]:
                            stable = False
                            break
                    if not stable:
                        break
                if stable:
                    summary = tuple((p, (parent[p], deltas[i])) for i, p in enumerate(movers))
                    everyone = span and all(parent[p] is not None for p in movers)
                    out.add((summary, everyone))
        return frozenset(out)

    return solve


def has_spanning_equilibrium(spec: GameSpec, continuation: str = "favorable") -> bool:
    """Whether ``G(r_d)`` has a subgame-perfect equilibrium reaching every player."""
    t = spec.topology
    st = structure(t)
    solve = _equilibrium_summaries(spec, continuation)
    h = History.initial(t, spec.r_d)
    comps = sorted({st.component[(1, q)] for _, q in h.offers}, key=min)
    for comp in comps:
        edges = st.frontier_edges[(1, comp)]
        res = solve(1, comp, tuple(h.offers.get(e, 0) for e in edges))
        if not any(span for _, span in res):
            return False
    return True


def min_spanning_incentive(topology: Topology, bound: int,
                           tiebreak: TieBreak = TieBreak.LOWEST_ID,
                           continuation: str = "favorable") -> int | None:
    """Smallest ``r_d <= bound`` with a spanning equilibrium, by exhaustive search."""
    info = validate_topology(topology)
    if info.shape == "general":
        raise TopologyError("minimum incentive search supports line, tree and ring only")
    for r_d in range(bound + 1):
        if has_spanning_equilibrium(GameSpec(topology, r_d, tiebreak=tiebreak), continuation):
            return r_d
    return None
