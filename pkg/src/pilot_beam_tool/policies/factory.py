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

from dataclasses import dataclass, field
from typing import Dict, Tuple, Union

from scipy.special import comb

from pilot_beam_tool.channel.model import ModelParams
from pilot_beam_tool.channel.transition import TransitionMatrix
from pilot_beam_tool.errors import ConfigurationError, ParameterError
from pilot_beam_tool.policies.base import Policy, PolicyKind, PolicySpec
from pilot_beam_tool.policies.baseline import HeuristicPolicy, RandomPolicy
from pilot_beam_tool.policies.planning import LookaheadPolicy, ReducedGreedyPolicy
from pilot_beam_tool.pomdp.belief import BeliefModel
from pilot_beam_tool.pomdp.enumeration import StateEnumeration
from pilot_beam_tool.pomdp.planner import LookaheadPlanner
from pilot_beam_tool.pomdp.reward import RewardSpec
from pilot_beam_tool.sensing.detector import DetectorSpec


logger = logging.getLogger(__name__)


# Largest `C(N_t, M_p)` for which a lookahead of depth two or more is accepted
MAX_LOOKAHEAD_ACTIONS = 5000


@dataclass
class PolicyContext:
    """
    Everything a policy may bind: the model, the transition matrix, the detector and the reward.

    The full-belief model is built once and shared by all the full-belief policies of an experiment.
    """

    params: ModelParams
    transition: TransitionMatrix
    detector: DetectorSpec
    m_p: int
    slots: int
    reward: RewardSpec = field(default_factory=RewardSpec)
    _models: Dict[str, BeliefModel] = field(default_factory=dict, repr=False)


    def belief_model(self) -> BeliefModel:
        model = self._models.get("full")
        if model is None:
            try:
                enumeration = StateEnumeration(self.params.n_tx, self.params.n_paths)
            except ParameterError as e:
                raise ConfigurationError(f"Full-belief policies are not available: {e}", key="policies") from e
            logger.debug(f"Building the full-belief model over {enumeration.n_states} states.")
            model = BeliefModel(enumeration, self.transition, self.detector, self.reward)
            self._models["full"] = model
        return model



def make_policy(spec: Union[PolicySpec, str], context: PolicyContext) -> Policy:
    """
    Build the policy described by `spec`.

    Args:
        spec (Union[PolicySpec, str]): The policy, or its string form such as `lookahead(2)`.
        context (PolicyContext): The experiment the policy plays.

    Returns:
        Policy: A policy whose per-episode state is created by `initial_state`.

    Raises:
        ConfigurationError: If the kind is unknown or cannot run on this configuration.
    """

    if not isinstance(spec, PolicySpec):
        spec = PolicySpec.parse(spec)
    n_tx, n_paths, m_p = context.params.n_tx, context.params.n_paths, context.m_p
    if not 1 <= m_p <= n_tx:
        raise ConfigurationError(f"The number of pilot beams must be in [1, {n_tx}], got {m_p}.", key="m_p")

    match spec.kind:
        case PolicyKind.RANDOM:
            return RandomPolicy(spec, n_tx, m_p)
        case PolicyKind.HEURISTIC:
            return HeuristicPolicy(spec, context.transition, m_p, n_paths)
        case PolicyKind.GREEDY_REDUCED:
            return ReducedGreedyPolicy(spec, context.transition, context.detector, m_p, n_paths)
        case PolicyKind.GREEDY_FULL | PolicyKind.LOOKAHEAD:
            depth = spec.depth if spec.kind is PolicyKind.LOOKAHEAD else 1
            if depth >= 2 and comb(n_tx, m_p, exact=True) > MAX_LOOKAHEAD_ACTIONS:
                raise ConfigurationError(f"{spec.label} would enumerate C({n_tx}, {m_p}) actions per belief.", key="policies")
            planner = LookaheadPlanner(context.belief_model(), m_p)
            return LookaheadPolicy(PolicySpec(spec.kind, depth), planner, context.slots)

    raise ConfigurationError(f"Unknown policy kind `{spec.kind}`.", key="policies")


def make_policies(specs: Tuple[Union[PolicySpec, str], ...], context: PolicyContext) -> Tuple[Policy, ...]:
    """Build several policies sharing the same context; labels must be distinct."""
    policies = tuple(make_policy(s, context) for s in specs)
    labels = [p.label for p in policies]
    if len(set(labels)) != len(labels):
        raise ConfigurationError(f"Duplicated policies in {labels}.", key="policies")
    if not policies:
        raise ConfigurationError("At least one policy is required.", key="policies")
    return policies
