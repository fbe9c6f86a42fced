# -*- coding: utf-8 -*-
# -----------------------------------------------------------------------------
# Version: 1.0
# Date: October 2026
# License: GNU Affero General Public License v3.0 (AGPL-3.0)
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU Affero General Public License as published
# by the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the
# GNU Affero General Public License for more details.
#
# You should have received a copy of the GNU Affero General Public License
# along with this program. If not, see <https://www.gnu.org/licenses/>.
# -----------------------------------------------------------------------------

import numpy as np

from pilot_beam_tool.channel.transition import TransitionMatrix
from pilot_beam_tool.pomdp.belief import FullBelief
from pilot_beam_tool.pomdp.planner import LookaheadPlanner
from pilot_beam_tool.policies.base import FullBeliefState, InitialKnowledge, Policy, PolicySpec, ReducedBeliefState
from pilot_beam_tool.reduced.belief import ReducedBelief, reduced_belief_update
from pilot_beam_tool.reduced.greedy import greedy_action
from pilot_beam_tool.sensing.detector import DetectorSpec
from pilot_beam_tool.sensing.observation import Action, Observation


class LookaheadPolicy(Policy):
    """
    Full-belief expectimax over the next `depth` slots, truncated at the end of the episode.

    With `depth = 1` this is the exact greedy policy (`greedy-full`).
    """

    def __init__(self, spec: PolicySpec, planner: LookaheadPlanner, slots: int):
        super().__init__(spec)
        self.planner = planner
        self.slots = slots


    def initial_state(self, knowledge: InitialKnowledge) -> FullBeliefState:
        enumeration = self.planner.model.enumeration
        if knowledge.is_known:
            return FullBeliefState(FullBelief.point_mass(enumeration.n_states, enumeration.to_index(knowledge.columns)))
        return FullBeliefState(FullBelief.uniform(enumeration.n_states))


    def choose(self, state: FullBeliefState, slot: int, rng: np.random.Generator) -> Action:
        return self.planner.plan(state.belief, self.spec.depth, horizon_remaining=self.slots - slot)


    def observe(self, state: FullBeliefState, action: Action, observation: Observation) -> FullBeliefState:
        return FullBeliefState(self.planner.model.belief_update(state.belief, action, observation))



class ReducedGreedyPolicy(Policy):
    """The fast greedy policy on the per-path marginals."""

    def __init__(self, spec: PolicySpec, transition: TransitionMatrix, detector: DetectorSpec, m_p: int, n_paths: int):
        super().__init__(spec)
        self.transition = transition
        self.detector = detector
        self.m_p = m_p
        self.n_paths = n_paths


    def initial_state(self, knowledge: InitialKnowledge) -> ReducedBeliefState:
        if knowledge.is_known:
            return ReducedBeliefState(ReducedBelief.point_mass(knowledge.columns, self.transition.size))
        return ReducedBeliefState(ReducedBelief.uniform(self.n_paths, self.transition.size))


    def choose(self, state: ReducedBeliefState, slot: int, rng: np.random.Generator) -> Action:
        return greedy_action(state.belief, self.transition, self.m_p)


    def observe(self, state: ReducedBeliefState, action: Action, observation: Observation) -> ReducedBeliefState:
        return ReducedBeliefState(reduced_belief_update(state.belief, action, observation, self.transition, self.detector))
