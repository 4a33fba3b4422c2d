"""Two-player reduction of the 3-stage ring and normal-form tools.

After stage 1 of the 3-stage ring, players 3 and 4 compete for the shared
last player 5.  Resolving that competition for every pair of stage-1 bids
``(r_1, r_2)`` leaves a bimatrix game between players 1 and 2 whose
payoffs are the profit terms ``(r_d - r_i) * delta_i``.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field

import numpy as np

from .game import GameSpec, History, play
from .strategies import FixedActions, FrontierProfile
from .topology import ring, validate_topology, TopologyError

Cell = tuple[int, int]


@dataclass(frozen=True)
class NormalFormMatrix:
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    row_payoff: np.ndarray = field(compare=False)
    col_payoff: np.ndarray = field(compare=False)
    note: str = ""

    def __post_init__(self):
        shape = (len(self.rows), len(self.cols))
        if self.row_payoff.shape != shape or self.col_payoff.shape != shape:
            raise ValueError("payoff arrays do not match the action sets")

    def payoff(self, r: int, c: int) -> tuple[int, int]:
        i, j = self.rows.index(r), self.cols.index(c)
        return int(self.row_payoff[i, j]), int(self.col_payoff[i, j])

    def restrict(self, rows, cols) -> NormalFormMatrix:
        ri = [self.rows.index(r) for r in rows]
        ci = [self.cols.index(c) for c in cols]
        return NormalFormMatrix(tuple(rows), tuple(cols),
                                self.row_payoff[np.ix_(ri, ci)], self.col_payoff[np.ix_(ri, ci)],
                                self.note)

    def same_game(self, other: NormalFormMatrix) -> bool:
        return (self.rows == other.rows and self.cols == other.cols
                and np.array_equal(self.row_payoff, other.row_payoff)
                and np.array_equal(self.col_payoff, other.col_payoff))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r1\\r2", *self.cols])
        for i, r in enumerate(self.rows):
            w.writerow([r, *(f"{self.row_payoff[i, j]};{self.col_payoff[i, j]}"
                             for j in range(len(self.cols)))])
        return buf.getvalue()


# -- stage-2 competition on the 3-stage ring ---------------------------------

def stage2_equilibria(spec: GameSpec, r1: int, r2: int) -> list[tuple[int, int]]:
    """All pure equilibria ``(r_3, r_4)`` of the stage-2 bidding game."""
    h = History(2, {(1, 3): r1, (2, 4): r2})
    caps = (max(r1, 1), max(r2, 1))
    util = {}
    for r3, r4 in itertools.product(range(caps[0]), range(caps[1])):
        o = play(spec, FixedActions({}), h, actions={3: {5: r3}, 4: {5: r4}})
        util[(r3, r4)] = (o.utilities[3].total, o.utilities[4].total)
    eqs = []
    for (r3, r4), (u3, u4) in util.items():
        if all(util[(a, r4)][0] <= u3 for a in range(caps[0])) and \
           all(util[(r3, b)][1] <= u4 for b in range(caps[1])):
            eqs.append((r3, r4))
    return sorted(eqs)


def _winner(spec: GameSpec, r3: int, r4: int) -> int | None:
    o = play(spec, FixedActions({}), History(3, {(3, 5): r3, (4, 5): r4}))
    return o.parent(5)


def _searched(spec: GameSpec, r1: int, r2: int) -> tuple[int, int]:
    eqs = stage2_equilibria(spec, r1, r2)
    if not eqs:
        raise RuntimeError(f"stage-2 subgame at ({r1}, {r2}) has no pure equilibrium")
    # the side with the higher parental reward wins; equal rewards go the way
    # player 5 breaks ties
    if r1 == r2:
        favored = _winner(spec, 1, 1)
    else:
        favored = 3 if r1 > r2 else 4
    cap = {3: max(r1 - 1, 0), 4: max(r2 - 1, 0)}

    def rank(eq):
        r3, r4 = eq
        win = _winner(spec, r3, r4)
        own = r3 if favored == 3 else r4
        other = (4 if favored == 3 else 3)
        other_bid = r4 if favored == 3 else r3
        return (win != favored, other_bid != cap[other], own, eq)

    return min(eqs, key=rank)


def _literal(r1: int, r2: int) -> tuple[int, int]:
    def bid(own, rival):
        if own <= 1:
            return 0
        if rival > 1:
            return min(own - 1, rival - 1)
        return 1

    return bid(r1, r2), bid(r2, r1)


RESOLUTIONS = ("searched", "literal")


def resolve_stage2(spec: GameSpec, r1: int, r2: int, resolution: str = "searched") -> tuple[int, int]:
    if resolution == "searched":
        return _searched(spec, r1, r2)
    if resolution == "literal":
        return _literal(r1, r2)
    raise ValueError(f"unknown resolution {resolution!r}")


def _check_ring3(spec: GameSpec):
    info = validate_topology(spec.topology)
    if info.shape != "ring" or info.depth != 3 or spec.topology != ring(3, spec.topology.destination):
        raise TopologyError("normal-form reduction needs the canonical 3-stage ring")


def reduce_to_normal_form(spec: GameSpec | None, r_d: int,
                          resolution: str = "searched") -> NormalFormMatrix:
    """Bimatrix of profit terms for players 1 and 2 at ``h^1 = r_d``."""
    if spec is None:
        spec = GameSpec(ring(3), r_d)
    _check_ring3(spec)
    if r_d < 1:
        raise ValueError("r_d must be at least 1")
    spec = spec.with_rd(r_d)
    acts = tuple(range(r_d))
    u1 = np.zeros((r_d, r_d), dtype=np.int64)
    u2 = np.zeros((r_d, r_d), dtype=np.int64)
    for r1, r2 in itertools.product(acts, acts):
        r3, r4 = resolve_stage2(spec, r1, r2, resolution)
        o = play(spec, FixedActions({}), actions={1: {3: r1}, 2: {4: r2}, 3: {5: r3}, 4: {5: r4}})
        u1[r1, r2] = o.utilities[1].profit
        u2[r1, r2] = o.utilities[2].profit
    note = f"3-stage ring, r_d={r_d}, stage 2 resolved by {resolution} rule, profit terms"
    return NormalFormMatrix(acts, acts, u1, u2, note)


def ring3_profile(spec: GameSpec, r1: int, r2: int,
                  resolution: str = "searched") -> FrontierProfile:
    """Frontier profile for the 3-stage ring.

    Stage 1 bids ``(r1, r2)``; stage-2 players play the resolved bids for
    every frontier ``(x_3, x_4)`` in ``0..r_d``.
    """
    _check_ring3(spec)
    tables = {1: {(spec.r_d, spec.r_d): {3: r1}}, 2: {(spec.r_d, spec.r_d): {4: r2}},
              3: {}, 4: {}, 5: {}}
    for x3, x4 in itertools.product(range(spec.r_d + 1), repeat=2):
        b3, b4 = resolve_stage2(spec, x3, x4, resolution)
        tables[3][(x3, x4)] = {5: b3}
        tables[4][(x3, x4)] = {5: b4}
    return FrontierProfile(tables)


# -- normal-form analysis --------------------------------------------------

def _dominated_rows(m: NormalFormMatrix) -> list[int]:
    out = []
    for i in range(len(m.rows)):
        for k in range(len(m.rows)):
            if k != i and np.all(m.row_payoff[k] > m.row_payoff[i]):
                out.append(m.rows[i])
                break
    return out


def _dominated_cols(m: NormalFormMatrix) -> list[int]:
    out = []
    for j in range(len(m.cols)):
        for k in range(len(m.cols)):
            if k != j and np.all(m.col_payoff[:, k] > m.col_payoff[:, j]):
                out.append(m.cols[j])
                break
    return out


ORDERS = ("rows-first", "cols-first", "simultaneous")


def iterated_strict_dominance(m: NormalFormMatrix, order: str = "rows-first"
                              ) -> tuple[NormalFormMatrix, list[tuple[str, int]]]:
    """Remove strictly dominated pure actions until none remain.

    ``rows-first``/``cols-first`` remove one action at a time, preferring
    the named player; ``simultaneous`` removes every dominated action of
    both players each round.  Returns the reduced matrix and the removals
    as ``("row" | "col", action)`` in order.
    """
    if order not in ORDERS:
        raise ValueError(f"unknown order {order!r}")
    removed: list[tuple[str, int]] = []
    while True:
        rows_out = _dominated_rows(m) if len(m.rows) > 1 else []
        cols_out = _dominated_cols(m) if len(m.cols) > 1 else []
        if not rows_out and not cols_out:
            return m, removed
        if order == "simultaneous":
            drop_r, drop_c = rows_out, cols_out
        elif order == "rows-first":
            drop_r, drop_c = (rows_out[:1], []) if rows_out else ([], cols_out[:1])
        else:
            drop_r, drop_c = ([], cols_out[:1]) if cols_out else (rows_out[:1], [])
        removed += [("row", r) for r in drop_r] + [("col", c) for c in drop_c]
        m = m.restrict([r for r in m.rows if r not in drop_r],
                       [c for c in m.cols if c not in drop_c])


def pure_nash(m: NormalFormMatrix) -> list[Cell]:
    cells = []
    for i, r in enumerate(m.rows):
        for j, c in enumerate(m.cols):
            if m.row_payoff[i, j] >= m.row_payoff[:, j].max() and \
               m.col_payoff[i, j] >= m.col_payoff[i, :].max():
                cells.append((r, c))
    return cells


def best_response(m: NormalFormMatrix, player: int, other: int) -> int:
    """Best reply to the opponent's action; lowest action on ties."""
    if player == 0:
        col = m.row_payoff[:, m.cols.index(other)]
        return m.rows[int(np.argmax(col))]
    row = m.col_payoff[m.rows.index(other), :]
    return m.cols[int(np.argmax(row))]


@dataclass(frozen=True)
class BRWalk:
    path: tuple[Cell, ...]
    cycle: tuple[Cell, ...]

    @property
    def converged(self) -> bool:
        return len(self.cycle) == 1


def best_response_cycle(m: NormalFormMatrix, start: Cell) -> BRWalk:
    """Alternate best replies (row player first) until a state repeats.

    A one-cell cycle is a pure equilibrium; longer cycles are the
    oscillation the game falls into instead.
    """
    if start[0] not in m.rows or start[1] not in m.cols:
        raise ValueError(f"start cell {start} is not in the matrix")
    cell, mover = start, 0
    seen: dict[tuple[Cell, int], int] = {}
    states: list[tuple[Cell, int]] = []
    while (cell, mover) not in seen:
        seen[(cell, mover)] = len(states)
        states.append((cell, mover))
        if mover == 0:
            cell = (best_response(m, 0, cell[1]), cell[1])
        else:
            cell = (cell[0], best_response(m, 1, cell[0]))
        mover = 1 - mover
    loop = [c for c, _ in states[seen[(cell, mover)]:]]
    return BRWalk(_squash([c for c, _ in states] + [cell]), _squash(loop, cyclic=True))


def _squash(cells: list[Cell], cyclic: bool = False) -> tuple[Cell, ...]:
    out: list[Cell] = []
    for c in cells:
        if not out or out[-1] != c:
            out.append(c)
    if cyclic and len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return tuple(out)
