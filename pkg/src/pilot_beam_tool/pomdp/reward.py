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
from enum import Enum

import numpy as np

from pilot_beam_tool.pomdp.enumeration import StateEnumeration
from pilot_beam_tool.sensing.observation import Action, Observation


class RewardKind(str, Enum):
    PATH_COUNT = "path-count" # Number of correctly identified paths (spatial multiplexing)
    MRC_LOG = "mrc-log"       # `log(1 + N_p · SNR)` of maximal ratio combining over the identified paths



@dataclass(frozen=True)
class RewardSpec:
    """The slot reward. `snr_per_path` is only read by the `mrc-log` variant."""

    kind: RewardKind = RewardKind.PATH_COUNT
    snr_per_path: float = 0.0


    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", RewardKind(self.kind))


    @property
    def is_separable(self) -> bool:
        """True when the expected reward is a sum of per-column terms."""
        return self.kind is RewardKind.PATH_COUNT


    def from_identified(self, identified: np.ndarray) -> np.ndarray:
        """Map the number of identified paths to the reward (element-wise)."""
        identified = np.asarray(identified, dtype=float)
        if self.kind is RewardKind.PATH_COUNT:
            return identified
        return np.log1p(identified * self.snr_per_path)



def immediate_reward(sensed_bins: np.ndarray, observation: Observation, spec: RewardSpec) -> float:
    """
    The reward of a slot given the number of occupied bins of each sensed column and the flags.

    A flagged column earns its occupied bins; a false alarm (flag on an empty column) earns nothing.

    Args:
        sensed_bins (np.ndarray): Occupied bins of the sensed columns, in the order of the action.
        observation (Observation): The flags.
        spec (RewardSpec): The reward variant.
    """

    identified = int(np.dot(np.asarray(sensed_bins, dtype=int), np.asarray(observation.flags, dtype=int)))
    return float(spec.from_identified(identified))


def immediate_reward_state(state_index: int, action: Action, observation: Observation, spec: RewardSpec, enumeration: StateEnumeration) -> float:
    """`immediate_reward` for an enumerated state, with the planning bin count (one bin per path)."""
    return immediate_reward(enumeration.bins_table[state_index][list(action.indices)], observation, spec)
