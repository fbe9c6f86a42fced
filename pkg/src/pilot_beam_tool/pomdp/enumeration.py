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

from functools import cached_property
from typing import Sequence, Tuple

import numpy as np

from pilot_beam_tool.channel.transition import TransitionMatrix
from pilot_beam_tool.errors import ParameterError


# Bijection between the flat state index `n` and the tuple of path columns
class StateEnumeration:
    """
    Enumerate the `N = N_t^L` joint column states.

    The flat index is the mixed-radix number whose most significant digit is the column of the
    first path, i.e., `n = i_1 N_t^{L-1} + ... + i_L` with 0-based columns. This is the same
    ordering as the L-fold Kronecker product of the transition matrix.
    """

    # Above this number of states the full-belief machinery is refused
    MAX_STATES = 4096


    def __init__(self, n_tx: int, n_paths: int):
        if n_tx ** n_paths > StateEnumeration.MAX_STATES:
            raise ParameterError(f"The joint state space N_t^L = {n_tx}^{n_paths} is too large to enumerate.")
        self.n_tx = n_tx
        self.n_paths = n_paths
        self.n_states = n_tx ** n_paths


    def to_columns(self, index: int) -> Tuple[int, ...]:
        """The path columns of state `index`."""
        if not 0 <= index < self.n_states:
            raise ParameterError(f"State index {index} outside [0, {self.n_states}).")
        return tuple(int(c) for c in np.unravel_index(index, (self.n_tx,) * self.n_paths))


    def to_index(self, columns: Sequence[int]) -> int:
        """The flat index of the state whose path columns are `columns`."""
        if len(columns) != self.n_paths:
            raise ParameterError(f"Expected {self.n_paths} columns, got {len(columns)}.")
        return int(np.ravel_multi_index(tuple(int(c) for c in columns), (self.n_tx,) * self.n_paths))


    @cached_property
    def columns_table(self) -> np.ndarray:
        """The `N x L` table of path columns of every state."""
        table = np.stack(np.unravel_index(np.arange(self.n_states), (self.n_tx,) * self.n_paths), axis=1)
        table.setflags(write=False)
        return table


    @cached_property
    def bins_table(self) -> np.ndarray:
        """The `N x N_t` table of the number of paths in each column of every state (the planning bin count)."""
        table = np.zeros((self.n_states, self.n_tx), dtype=int)
        for path in range(self.n_paths):
            table[np.arange(self.n_states), self.columns_table[:, path]] += 1
        table.setflags(write=False)
        return table


    def joint_transition(self, transition: TransitionMatrix) -> np.ndarray:
        """The `N x N` joint transition matrix, the L-fold Kronecker product of `P` (paths move independently)."""
        if transition.size != self.n_tx:
            raise ParameterError(f"Transition matrix size {transition.size} does not match N_t={self.n_tx}.")
        joint = np.ones((1, 1))
        for _ in range(self.n_paths):
            joint = np.kron(joint, transition.entries)
        return joint
