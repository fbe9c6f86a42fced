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

import logging

from functools import cached_property
from typing import List, Optional, Tuple

import numpy as np

from pilot_beam_tool.errors import ParameterError
from pilot_beam_tool.pomdp.belief import BeliefModel, FullBelief
from pilot_beam_tool.sensing.observation import Action, all_actions
from pilot_beam_tool.utils.ranking import first_best, top_columns


logger = logging.getLogger(__name__)


# Depth-limited expectimax over actions and observation branches
class LookaheadPlanner:
    """
    Receding-horizon planner maximizing the expected reward of the next `d` slots.

    The value of a belief is positively homogeneous in the belief, so the recursion runs on
    unnormalized joint vectors `πP ∘ q_j^a` and never divides by `γ(o^(j) | π, a)`: the
    observation probability is carried by the mass of the vector. Terminal value is 0.

    At depth 1 with the path-count reward the expected reward is a sum of per-column scores,
    so the best action is the set of the `M_p` best columns and no action enumeration is needed.
    """

    # Largest number of entries of a batched branch tensor; larger batches loop over actions
    BATCH_LIMIT = 2_000_000


    def __init__(self, model: BeliefModel, m_p: int):
        if not 1 <= m_p <= model.n_tx:
            raise ParameterError(f"The number of pilot beams must be in [1, {model.n_tx}], got {m_p}.")
        self.model = model
        self.m_p = m_p


    @cached_property
    def actions(self) -> List[Action]:
        """The canonical action list, enumerated on first use only."""
        return all_actions(self.model.n_tx, self.m_p)


    @cached_property
    def _state_action_rewards(self) -> np.ndarray:
        """`|A| x N` matrix of expected rewards given the post-transition state."""
        return np.stack([self.model.state_action_reward(a) for a in self.actions])


    @cached_property
    def _likelihood_tensor(self) -> Optional[np.ndarray]:
        """`|A| x N x 2^{M_p}` likelihoods of all actions, or None when it would not fit in the model cache."""
        size = len(self.actions) * self.model.n_states * 2 ** self.m_p
        if size > BeliefModel.CACHE_LIMIT:
            logger.debug(f"Likelihood tensor of {size} entries not cached, looping over actions.")
            return None
        return np.stack([self.model.likelihoods(a) for a in self.actions])


    def plan(self, belief: FullBelief, depth: int, horizon_remaining: int = None) -> Action:
        """
        Choose the action maximizing the expected reward of the next `min(depth, horizon_remaining)` slots.

        Args:
            belief (FullBelief): The pre-transition belief.
            depth (int): The lookahead depth `d >= 1`; `d = 1` is the exact greedy policy.
            horizon_remaining (int, optional): Slots left in the episode, including the current one.

        Returns:
            Action: The best action, ties resolved by canonical action order.
        """

        effective = self._effective_depth(depth, horizon_remaining)
        if effective == 1 and self.model.reward.is_separable:
            scores = self.model.predict(belief.probs) @ self.model.column_scores
            return Action.of(top_columns(scores, self.m_p))
        values = self.action_values(belief, effective)
        return self.actions[first_best(values)]


    def value(self, belief: FullBelief, depth: int, horizon_remaining: int = None) -> float:
        """The expectimax value of `belief` at the effective depth."""
        effective = self._effective_depth(depth, horizon_remaining)
        return float(self._values(belief.probs[None, :], effective)[0])


    def action_values(self, belief: FullBelief, depth: int) -> np.ndarray:
        """The root value of every canonical action at the given depth (immediate reward plus expected future value)."""
        return self._branch_values(belief.probs[None, :], depth)[0]


    def _effective_depth(self, depth: int, horizon_remaining: int) -> int:
        if depth < 1:
            raise ParameterError(f"The lookahead depth must be at least 1, got {depth}.")
        if horizon_remaining is None:
            return depth
        return max(1, min(depth, horizon_remaining))


    def _values(self, weights: np.ndarray, depth: int) -> np.ndarray:
        """Expectimax values of a batch `K x N` of unnormalized pre-transition beliefs."""
        if depth == 1 and self.model.reward.is_separable:
            scores = self.model.predict(weights) @ self.model.column_scores
            return np.sort(scores, axis=1)[:, -self.m_p:].sum(axis=1)
        return self._branch_values(weights, depth).max(axis=1)


    def _branch_values(self, weights: np.ndarray, depth: int) -> np.ndarray:
        """`K x |A|` values of every action for a batch of unnormalized pre-transition beliefs."""
        predicted = self.model.predict(weights)
        values = predicted @ self._state_action_rewards.T
        if depth == 1:
            return values
        tensor = self._likelihood_tensor
        if tensor is not None and predicted.shape[0] * tensor.size <= LookaheadPlanner.BATCH_LIMIT:
            # `K x |A| x J x N` posterior joints of every action and observation branch at once
            branches = predicted[:, None, None, :] * tensor.transpose(0, 2, 1)[None]
            k, a, j, n = branches.shape
            future = self._values(branches.reshape(k * a * j, n), depth - 1).reshape(k, a, j).sum(axis=2)
            return values + future
        for a_idx, action in enumerate(self.actions):
            likelihoods = self.model.likelihoods(action)
            # `K x J x N` posterior joints, one per observation branch
            branches = predicted[:, None, :] * likelihoods.T[None, :, :]
            k, j, n = branches.shape
            future = self._values(branches.reshape(k * j, n), depth - 1).reshape(k, j).sum(axis=1)
            values[:, a_idx] += future
        return values


def lookahead_plan(model: BeliefModel, belief: FullBelief, depth: int, horizon_remaining: int, m_p: int) -> Tuple[Action, float]:
    """Functional form of `LookaheadPlanner.plan`, also returning the root value."""
    planner = LookaheadPlanner(model, m_p)
    return planner.plan(belief, depth, horizon_remaining), planner.value(belief, depth, horizon_remaining)
