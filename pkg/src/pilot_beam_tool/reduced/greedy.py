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

from enum import Enum

import numpy as np

from pilot_beam_tool.channel.transition import TransitionMatrix
from pilot_beam_tool.errors import ParameterError
from pilot_beam_tool.reduced.belief import ReducedBelief
from pilot_beam_tool.sensing.detector import DetectorSpec
from pilot_beam_tool.sensing.observation import Action
from pilot_beam_tool.utils.ranking import top_columns


class RewardMode(str, Enum):
    EXACT = "exact"         # Each sensed path is detected with the column-level detection probability
    ZERO_MISS = "zero-miss" # Each sensed path is detected with probability one



def score_vector(belief: ReducedBelief, transition: TransitionMatrix) -> np.ndarray:
    """
    The length-`N_t` vector `P'ω`: entry `m` is the expected number of paths in column `m` after the transition.

    `P' = [P^T, ..., P^T]` stacked `L` times, i.e., `v_m = Σ_l Σ_n ω_{l,n} p_{n,m}`; it costs `N_t² L` products.
    """

    return (belief.marginals @ transition.entries).sum(axis=0)


def greedy_action(belief: ReducedBelief, transition: TransitionMatrix, m_p: int) -> Action:
    """The `M_p` columns with the largest scores in `P'ω`, ties broken by ascending column."""
    if not 1 <= m_p <= belief.n_tx:
        raise ParameterError(f"The number of pilot beams must be in [1, {belief.n_tx}], got {m_p}.")
    return Action.of(top_columns(score_vector(belief, transition), m_p))


def reduced_expected_reward(belief: ReducedBelief, action: Action, transition: TransitionMatrix,
                            mode: RewardMode = RewardMode.ZERO_MISS, detector: DetectorSpec = None) -> float:
    """
    The expected path-count reward of an action computed from the per-path marginals.

    In exact mode every path found in a sensed column counts with the single-path column detection
    probability `1 - (1-P_FA)^{N_r-1} P_MD`; in zero-miss mode it always counts.
    """

    mode = RewardMode(mode)
    if mode is RewardMode.EXACT:
        if detector is None:
            raise ParameterError("The exact reduced reward needs a detector.")
        detection = detector.column_detection
    else:
        detection = 1.0
    columns = list(action.indices)
    # `Σ_n ω_{l,n} p_{n,a_m}` for every path and beam
    presence = belief.marginals @ transition.entries[:, columns]
    return float(np.sum(detection * presence))
