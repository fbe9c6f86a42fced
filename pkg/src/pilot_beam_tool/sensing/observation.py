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

import itertools

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, List, Tuple

import numpy as np

from pilot_beam_tool.errors import ParameterError


# The columns sensed by the pilot beams of a slot
@dataclass(frozen=True, order=True)
class Action:
    """The `M_p` distinct VCM columns (0-based) sensed in one slot, kept sorted ascending."""

    indices: Tuple[int, ...]


    def __post_init__(self) -> None:
        indices = tuple(sorted(int(i) for i in self.indices))
        if len(set(indices)) != len(indices):
            raise ParameterError(f"Action columns must be distinct, got {self.indices}.")
        object.__setattr__(self, "indices", indices)


    @staticmethod
    def of(indices: Iterable[int]) -> "Action":
        """Build the canonical (sorted) action from any iterable of columns."""
        return Action(tuple(indices))


    @property
    def size(self) -> int:
        return len(self.indices)


    def validate(self, n_tx: int) -> None:
        if any(not 0 <= i < n_tx for i in self.indices):
            raise ParameterError(f"Action {list(self.indices)} has columns outside [0, {n_tx}).")


    def __contains__(self, column: int) -> bool:
        return column in self.indices


    def __iter__(self):
        return iter(self.indices)


    def __str__(self) -> str:
        return f"Action({list(self.indices)})"



# The detection flags fed back by the receiver
@dataclass(frozen=True)
class Observation:
    """The `M_p` binary detection flags, one per sensed column of the `Action` (same order)."""

    flags: Tuple[int, ...]


    def __post_init__(self) -> None:
        flags = tuple(int(f) for f in self.flags)
        if any(f not in (0, 1) for f in flags):
            raise ParameterError(f"Observation flags must be 0 or 1, got {self.flags}.")
        object.__setattr__(self, "flags", flags)


    @property
    def index(self) -> int:
        """The index `j` of this observation in `observation_space` (first flag is the most significant bit)."""
        j = 0
        for f in self.flags:
            j = (j << 1) | f
        return j


    @staticmethod
    def from_index(index: int, m_p: int) -> "Observation":
        return Observation(tuple(int(b) for b in observation_space(m_p)[index]))


    def __str__(self) -> str:
        return "".join(str(f) for f in self.flags)



@lru_cache(maxsize=None)
def observation_space(m_p: int) -> np.ndarray:
    """
    The `2^{M_p} x M_p` matrix of all flag vectors; row `j` is observation `j`.

    The first column is the most significant bit of `j`, so row 0 is all zeros and the last row is all ones.
    """

    j = np.arange(2 ** m_p)[:, None]
    shifts = np.arange(m_p - 1, -1, -1)[None, :]
    space = (j >> shifts) & 1
    space.setflags(write=False)
    return space


def all_actions(n_tx: int, m_p: int) -> List[Action]:
    """All `C(N_t, M_p)` actions in canonical lexicographic order."""
    if not 1 <= m_p <= n_tx:
        raise ParameterError(f"The number of pilot beams must be in [1, {n_tx}], got {m_p}.")
    return [Action(c) for c in itertools.combinations(range(n_tx), m_p)]


@lru_cache(maxsize=16)
def action_matrix(n_tx: int, m_p: int) -> np.ndarray:
    """The `C(N_t, M_p) x M_p` integer matrix of the canonical actions (one action per row)."""
    matrix = np.array(list(itertools.combinations(range(n_tx), m_p)), dtype=int)
    matrix.setflags(write=False)
    return matrix
