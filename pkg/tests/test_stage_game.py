from __future__ import annotations

import itertools

import pytest
from hypothesis import given, strategies as st

from route_incentives.equilibria import build_line_spe, build_tree_spe
from route_incentives.game import GameSpec, History, play
from route_incentives.normal_form import ring3_profile
from route_incentives.stage_game import (action_space, histories, is_nash, is_subgame_perfect,
                                         responses, stages)
from route_incentives.strategies import LocalProfile
from route_incentives.topology import Topology, balanced_tree, line, ring, star


def edit(profile: LocalProfile, player: int, incoming: int, action: dict) -> LocalProfile:
    tables = {p: {x: dict(a) for x, a in tab.items()} for p, tab in profile.tables.items()}
    tables[player][incoming] = action
    return LocalProfile(tables)


def test_stages_examples():
    assert stages(line(3)) == {1: 1, 2: 2, 3: 3}
    assert stages(ring(3)) == {1: 1, 2: 1, 3: 2, 4: 2, 5: 3}
    assert set(stages(star(5)).values()) == {1}


def test_action_space_counts():
    t = balanced_tree(2, 2)
    assert len(list(action_space(t, 1, 3))) == 9
    assert list(action_space(t, 1, 1)) == [{3: 0, 4: 0}]
    assert list(action_space(t, 3, 5)) == [{}]


def test_line_spe_is_nash_and_spe():
    spec = GameSpec(line(3), 3)
    p = build_line_spe(3, 3)
    assert is_nash(spec, p)
    assert is_subgame_perfect(spec, p)


def test_forcing_r1_to_one_is_a_tie_not_a_failure():
    # r_1 = 1 and r_1 = 2 both give player 1 a utility of 4
    spec = GameSpec(line(3), 3)
    p = edit(build_line_spe(3, 3), 1, 3, {2: 1})
    assert play(spec, p).utilities[1].total == 4
    assert is_nash(spec, p)
    assert is_subgame_perfect(spec, p)


def test_refusing_a_profitable_sale_breaks_perfection():
    spec = GameSpec(line(3), 3)
    p = edit(build_line_spe(3, 3), 2, 2, {3: 0})
    assert not is_subgame_perfect(spec, p)
    check = is_nash(spec, p, History(2, {(1, 2): 2}))
    assert not check
    assert check.witness.player == 2
    assert check.witness.action == {3: 1}
    assert check.witness.gain == 1


def test_witness_is_a_real_improvement():
    spec = GameSpec(line(3), 3)
    p = edit(build_line_spe(3, 3), 2, 2, {3: 0})
    check = is_nash(spec, p)
    w = check.witness
    assert w is not None
    after = play(spec, p, check.history, actions={w.player: w.action})
    assert after.utilities[w.player].total == w.after > w.before


@pytest.mark.parametrize("r1,r2", list(itertools.product(range(6), repeat=2)))
def test_three_stage_ring_at_six_has_no_equilibrium(r1, r2):
    spec = GameSpec(ring(3), 6)
    assert not is_nash(spec, ring3_profile(spec, r1, r2))


def test_literal_stage2_rule_is_not_perfect():
    # the literal rule makes (2, 1) look stable at stage 1, but the losing
    # stage-2 bidder can overbid
    spec = GameSpec(ring(3), 6)
    p = ring3_profile(spec, 2, 1, resolution="literal")
    assert is_nash(spec, p)
    assert not is_subgame_perfect(spec, p)


def test_histories_cover_every_frontier():
    spec = GameSpec(ring(3), 2)
    hs = list(histories(spec))
    assert hs[0] == History.initial(spec.topology, 2)
    assert len(hs) == 1 + 3 ** 2 + 3 ** 2


def test_responses_include_declining_and_every_sender():
    spec = GameSpec(ring(2), 3)
    p = LocalProfile({1: {3: {3: 2}}, 2: {3: {3: 1}}, 3: {x: {} for x in range(4)}})
    res = responses(spec, p, 3)
    assert (0, None, {}) in res
    assert {s for _, s, _ in res} == {None, 1, 2}
    assert max(u for u, _, _ in res) == 1  # accept 2 from player 1


# -- brute force over full strategies ---------------------------------------

def all_tables(topology: Topology, player: int, r_d: int):
    """Every LocalProfile table a player could use (rewards 2..r_d matter)."""
    kids = topology.children(player)
    xs = list(range(2, r_d + 1))
    per_x = [list(action_space(topology, player, x)) for x in xs]
    for combo in itertools.product(*per_x):
        table = {x: {c: 0 for c in kids} for x in range(r_d + 1)}
        table.update(dict(zip(xs, combo)))
        yield table


def brute_force_nash(spec: GameSpec, profile: LocalProfile) -> bool:
    base = play(spec, profile)
    for p in spec.topology.players:
        before = base.utilities[p].total
        for table in all_tables(spec.topology, p, spec.r_d):
            alt = LocalProfile({**profile.tables, p: table})
            if play(spec, alt).utilities[p].total > before:
                return False
    return True


SMALL = [line(2), line(3), line(4), star(3), ring(2),
         Topology.from_edges([(0, 1), (1, 2), (1, 3)]),
         Topology.from_edges([(0, 1), (0, 2), (2, 3), (1, 4)])]


@st.composite
def small_games(draw):
    t = draw(st.sampled_from(SMALL))
    multi = any(len(t.children(p)) > 1 for p in t.players)
    r_d = draw(st.integers(0, 4 if multi else 5))
    tables = {}
    for p in t.players:
        kids = t.children(p)
        tables[p] = {x: {c: draw(st.integers(0, max(x - 1, 0))) for c in kids}
                     for x in range(r_d + 1)}
    return GameSpec(t, r_d), LocalProfile(tables)


@given(small_games())
def test_single_action_deviations_match_strategy_enumeration(game):
    spec, profile = game
    assert bool(is_nash(spec, profile)) == brute_force_nash(spec, profile)


@pytest.mark.parametrize("topology", SMALL[:4] + SMALL[5:])
@pytest.mark.parametrize("r_d", range(0, 5))
def test_constructed_profiles_pass_brute_force(topology, r_d):
    spec = GameSpec(topology, r_d)
    assert brute_force_nash(spec, build_tree_spe(r_d, topology))


@given(small_games())
def test_perfect_implies_nash(game):
    spec, profile = game
    if is_subgame_perfect(spec, profile):
        assert is_nash(spec, profile)


@given(st.integers(0, 6), st.integers(1, 4))
def test_constructed_line_profile_is_perfect(r_d, k):
    spec = GameSpec(line(k), r_d)
    p = build_line_spe(r_d, k)
    assert is_subgame_perfect(spec, p)
    assert is_nash(spec, p)
