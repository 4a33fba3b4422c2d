"""Route distribution incentive game: simulation, equilibria and verification."""

from .dynamics import (ConvergenceReport, ProtocolState, RunResult, Schedule,
                       check_unique_convergence, leaf_first, run, step)
from .equilibria import (RingSpecial, build_line_spe, build_ring2_ne, build_ring_special,
                         build_tree_spe, growth_f, growth_table, has_spanning_equilibrium,
                         min_spanning_incentive)
from .game import (COST, GameSpec, History, InvalidActionError, OutcomeTree, RewardOffer,
                   TieBreak, Utility, hrp_select, outcome_from_actions, play, utility)
from .normal_form import (NormalFormMatrix, best_response_cycle, iterated_strict_dominance,
                          pure_nash, reduce_to_normal_form, ring3_profile)
from .stage_game import (Deviation, NashCheck, SPECheck, action_space, is_nash,
                         is_subgame_perfect, stages)
from .strategies import (FixedActions, FrontierProfile, FunctionProfile, LocalProfile,
                         StrategyProfile, profile_from_dict)
from .topology import Topology, TopologyError, line, ring, validate_topology

__all__ = [
    "COST", "ConvergenceReport", "Deviation", "FixedActions", "FrontierProfile",
    "FunctionProfile", "GameSpec", "History", "InvalidActionError", "LocalProfile",
    "NashCheck", "NormalFormMatrix", "OutcomeTree", "ProtocolState", "RewardOffer",
    "RingSpecial", "RunResult", "SPECheck", "Schedule", "StrategyProfile", "TieBreak",
    "Topology", "TopologyError", "Utility", "action_space", "best_response_cycle",
    "build_line_spe", "build_ring2_ne", "build_ring_special", "build_tree_spe",
    "check_unique_convergence", "growth_f", "growth_table", "has_spanning_equilibrium",
    "hrp_select", "is_nash", "is_subgame_perfect", "iterated_strict_dominance", "leaf_first",
    "line", "min_spanning_incentive", "outcome_from_actions", "play", "profile_from_dict",
    "pure_nash", "reduce_to_normal_form", "ring", "ring3_profile", "run", "stages", "step",
    "utility", "validate_topology",
]
