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

from dataclasses import dataclass
from functools import cached_property
from typing import Dict

import numpy as np

from pilot_beam_tool.channel.transition import TransitionMatrix
from pilot_beam_tool.errors import ImpossibleObservationError, ParameterError
from pilot_beam_tool.pomdp.enumeration import StateEnumeration
from pilot_beam_tool.pomdp.reward import RewardSpec
from pilot_beam_tool.sensing.detector import DetectorSpec, likelihood_matrix
from pilot_beam_tool.sensing.observation import Action, Observation, observation_space


@dataclass(frozen=True)
class FullBelief:
    """
    The posterior `π` over the `N_t^L` enumerated states.

    The belief refers to the state *before* the transition of the coming slot: every operation
    of `BeliefModel` applies the transition matrix internally.
    """

    probs: np.ndarray

    # Tolerance on the total mass
    MASS_TOLERANCE = 1e-10


    def __post_init__(self) -> None:
        probs = np.array(self.probs, dtype=float)
        if probs.ndim != 1 or np.any(probs < 0) or abs(probs.sum() - 1.0) > FullBelief.MASS_TOLERANCE:
            raise ParameterError("A full belief must be a non-negative vector summing to 1.")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)


    @property
    def n_states(self) -> int:
        return self.probs.shape[0]


    @staticmethod
    def uniform(n_states: int) -> "FullBelief":
        """The belief of an unknown initial state."""
        return FullBelief(np.full(n_states, 1.0 / n_states))


    @staticmethod
    def point_mass(n_states: int, index: int) -> "FullBelief":
        """
        The belief of a disclosed state.

        Args:
            n_states (int): The size `N_t^L` of the state space.
            index (int): The enumerated index of the known state.

        Returns:
            FullBelief: All the mass on `index`.
        """

        probs = np.zeros(n_states)
        probs[index] = 1.0
        return FullBelief(probs)


    def mixture(self, other: "FullBelief", weight: float) -> "FullBelief":
        """The convex combination `weight·self + (1-weight)·other`."""
        return FullBelief(weight * self.probs + (1.0 - weight) * other.probs)



# Exact Bayes filtering and rewards over the enumerated state space
class BeliefModel:
    """
    The full-belief POMDP of one configuration: state enumeration, joint transition, observation likelihoods and rewards.

    Likelihoods use the planning bin count (one bin per path in a column), since rows are not part
    of the enumerated state. Per-action likelihood tables are cached while their total size stays
    below `CACHE_LIMIT` entries.
    """

    CACHE_LIMIT = 4_000_000


    def __init__(self, enumeration: StateEnumeration, transition: TransitionMatrix, detector: DetectorSpec, reward: RewardSpec = RewardSpec()):
        """
        Args:
            enumeration (StateEnumeration): The enumerated state space.
            transition (TransitionMatrix): The per-path column transition `P`.
            detector (DetectorSpec): The channel sensor.
            reward (RewardSpec): The immediate reward; the path count by default.

        Raises:
            ParameterError: If `transition` does not match the number of columns of `enumeration`.
        """

        self.enumeration = enumeration
        self.transition = transition
        self.detector = detector
        self.reward = reward
        self.joint = enumeration.joint_transition(transition) # `N x N` joint transition matrix
        self.quiet_table = detector.column_quiet(enumeration.bins_table) # `N x N_t` probabilities that a column stays quiet
        self._likelihood_cache: Dict[Action, np.ndarray] = {}
        self._cached_entries = 0


    @property
    def n_states(self) -> int:
        return self.enumeration.n_states


    @property
    def n_tx(self) -> int:
        return self.enumeration.n_tx


    @cached_property
    def column_scores(self) -> np.ndarray:
        """`N x N_t` expected path-count reward earned by sensing each column in each state."""
        return self.enumeration.bins_table * (1.0 - self.quiet_table)


    def predict(self, probs: np.ndarray) -> np.ndarray:
        """The one-step predicted belief `πP` (works on a batch of row vectors)."""
        return probs @ self.joint


    def likelihoods(self, action: Action) -> np.ndarray:
        """The `N x 2^{M_p}` table of `q_ij^a` for the given action."""
        table = self._likelihood_cache.get(action)
        if table is not None:
            return table
        table = likelihood_matrix(self.quiet_table[:, list(action.indices)])
        if self._cached_entries + table.size <= BeliefModel.CACHE_LIMIT:
            self._likelihood_cache[action] = table
            self._cached_entries += table.size
        return table


    def observation_column(self, action: Action, observation: Observation) -> np.ndarray:
        """The length-`N` vector `q_ij^a` of one observation, without building the full table."""
        quiet = self.quiet_table[:, list(action.indices)]
        flags = np.asarray(observation.flags)
        return np.prod(np.where(flags == 1, 1.0 - quiet, quiet), axis=1)


    def rewards(self, action: Action) -> np.ndarray:
        """The `N x 2^{M_p}` table of the immediate rewards `r(s^(i), a, o^(j))`."""
        bins = self.enumeration.bins_table[:, list(action.indices)]
        identified = bins @ observation_space(action.size).T
        return self.reward.from_identified(identified)


    def state_action_reward(self, action: Action) -> np.ndarray:
        """The length-`N` vector `Σ_j q_ij^a r(s^(i), a, o^(j))` (expected reward given the post-transition state)."""
        if self.reward.is_separable:
            return self.column_scores[:, list(action.indices)].sum(axis=1)
        return np.sum(self.likelihoods(action) * self.rewards(action), axis=1)


    def expected_reward_state(self, prior_state: int, action: Action) -> float:
        """`R(s^(n), a) = Σ_i p_ni Σ_j q_ij^a r(s^(i), a, o^(j))`, from the state before the transition."""
        return float(self.joint[prior_state] @ self.state_action_reward(action))


    def expected_reward_belief(self, belief: FullBelief, action: Action) -> float:
        """`<R(a), π>`, the expected immediate reward of an action under the pre-transition belief."""
        return float(self.predict(belief.probs) @ self.state_action_reward(action))


    def obs_likelihood(self, belief: FullBelief, action: Action, observation: Observation) -> float:
        """`γ(o^(j) | π, a) = Σ_i q_ij^a Σ_n π_n p_ni`."""
        return float(self.predict(belief.probs) @ self.observation_column(action, observation))


    def belief_update(self, belief: FullBelief, action: Action, observation: Observation) -> FullBelief:
        """
        Bayes update of the belief after sensing `action` and receiving `observation`.

        Returns:
            FullBelief: The posterior over the post-transition state, normalized.

        Raises:
            ImpossibleObservationError: If the observation has zero probability under `belief`.
        """

        joint = self.predict(belief.probs) * self.observation_column(action, observation)
        total = joint.sum()
        if not total > 0.0:
            raise ImpossibleObservationError(f"Observation {observation} has zero probability for {action}.")
        return FullBelief(joint / total)
