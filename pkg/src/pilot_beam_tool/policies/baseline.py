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

from typing import List, Optional, Sequence, Tuple

import numpy as np

from pilot_beam_tool.channel.transition import TransitionMatrix
from pilot_beam_tool.errors import ConfigurationError, ParameterError
from pilot_beam_tool.policies.base import InitialKnowledge, NoState, Policy, PolicySpec, PolicyState, TrackerState
from pilot_beam_tool.sensing.observation import Action, Observation
from pilot_beam_tool.utils.ranking import rank_columns


def random_policy_choose(rng: np.random.Generator, n_tx: int, m_p: int) -> Action:
    """A uniformly random set of `m_p` distinct columns."""
    if not 1 <= m_p <= n_tx:
        raise ParameterError(f"The number of pilot beams must be in [1, {n_tx}], got {m_p}.")
    return Action.of(rng.choice(n_tx, size=m_p, replace=False))



def beams_per_tracker(m_p: int, n_paths: int) -> int:
    if n_paths < 1 or m_p % n_paths != 0:
        raise ConfigurationError(f"The heuristic needs M_p={m_p} divisible by the number of paths L={n_paths}.", key="m_p")
    return m_p // n_paths


def spread_centers(n_tx: int, n_paths: int) -> Tuple[int, ...]:
    """Evenly spaced starting columns, `floor((l + 1/2) N_t / L)` for tracker `l`."""
    return tuple(int((l + 0.5) * n_tx / n_paths) for l in range(n_paths))


def _assign_beams(centers: Sequence[int], keep: Sequence[Optional[Tuple[int, ...]]], transition: TransitionMatrix, per_tracker: int) -> Tuple[Tuple[int, ...], ...]:
    # Trackers keeping their beams claim them first, then the others pick in tracker order
    taken = set()
    for beams in keep:
        if beams is not None:
            taken.update(beams)
    assigned: List[Tuple[int, ...]] = []
    for center, beams in zip(centers, keep):
        if beams is None:
            beams = tuple(rank_columns(transition.row(center), exclude=taken)[:per_tracker])
            taken.update(beams)
        assigned.append(beams)
    return tuple(assigned)


def heuristic_initial_state(knowledge: InitialKnowledge, transition: TransitionMatrix, m_p: int, n_paths: int) -> TrackerState:
    """Lock every tracker on its initial column (the true one when disclosed) and give it its best beams."""
    per_tracker = beams_per_tracker(m_p, n_paths)
    if m_p > transition.size:
        raise ParameterError(f"The number of pilot beams must be in [1, {transition.size}], got {m_p}.")
    centers = tuple(knowledge.columns) if knowledge.is_known else spread_centers(transition.size, n_paths)
    if len(centers) != n_paths:
        raise ParameterError(f"Expected {n_paths} initial columns, got {len(centers)}.")
    return TrackerState(centers=centers, beams=_assign_beams(centers, [None] * n_paths, transition, per_tracker))


def heuristic_policy_step(state: TrackerState, last_action: Action, last_observation: Observation,
                          transition: TransitionMatrix, m_p: int, n_paths: int) -> Tuple[Action, TrackerState]:
    """
    One slot of the path trackers.

    Each tracker senses `M_p / L` columns. When one of them was flagged in the last slot the
    tracker re-centres on the first flagged beam (in its ranking order) and takes the columns
    with the largest transition probability from there; otherwise it keeps its beams.
    Collisions are resolved by skipping to the next-best free column, trackers that keep their
    beams being served first.

    Args:
        state (TrackerState): The trackers after the last slot.
        last_action (Action): The columns sensed in the last slot.
        last_observation (Observation): Their flags.
        transition (TransitionMatrix): The matrix `P`.
        m_p (int): The number of pilot beams.
        n_paths (int): The number of trackers `L`.

    Returns:
        Tuple[Action, TrackerState]: The next action and the updated trackers.

    Raises:
        ConfigurationError: If `m_p` is not divisible by `n_paths`.
    """

    per_tracker = beams_per_tracker(m_p, n_paths)
    flagged = {column for column, flag in zip(last_action.indices, last_observation.flags) if flag == 1}

    centers, keep = [], []
    for center, beams in zip(state.centers, state.beams):
        hit = next((b for b in beams if b in flagged), None)
        if hit is None:
            centers.append(center)
            keep.append(beams)
        else:
            centers.append(hit)
            keep.append(None)

    beams = _assign_beams(centers, keep, transition, per_tracker)
    new_state = TrackerState(centers=tuple(centers), beams=beams)
    return Action.of(b for tracker in beams for b in tracker), new_state



class RandomPolicy(Policy):
    """Sense `M_p` columns drawn uniformly at random every slot, ignoring the feedback."""

    def __init__(self, spec: PolicySpec, n_tx: int, m_p: int):
        super().__init__(spec)
        self.n_tx = n_tx
        self.m_p = m_p


    def initial_state(self, knowledge: InitialKnowledge) -> PolicyState:
        return NoState()


    def choose(self, state: PolicyState, slot: int, rng: np.random.Generator) -> Action:
        return random_policy_choose(rng, self.n_tx, self.m_p)


    def observe(self, state: PolicyState, action: Action, observation: Observation) -> PolicyState:
        return state



class HeuristicPolicy(Policy):
    """One tracker per path following its last detection along the most likely moves."""

    def __init__(self, spec: PolicySpec, transition: TransitionMatrix, m_p: int, n_paths: int):
        super().__init__(spec)
        beams_per_tracker(m_p, n_paths)
        self.transition = transition
        self.m_p = m_p
        self.n_paths = n_paths


    def initial_state(self, knowledge: InitialKnowledge) -> TrackerState:
        return heuristic_initial_state(knowledge, self.transition, self.m_p, self.n_paths)


    def choose(self, state: TrackerState, slot: int, rng: np.random.Generator) -> Action:
        return Action.of(b for tracker in state.beams for b in tracker)


    def observe(self, state: TrackerState, action: Action, observation: Observation) -> TrackerState:
        return heuristic_policy_step(state, action, observation, self.transition, self.m_p, self.n_paths)[1]
