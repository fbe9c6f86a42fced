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

import numpy as np

from pilot_beam_tool.errors import ParameterError


# Row-stochastic matrix driving the column (AoD) random walk of every path
@dataclass(frozen=True)
class TransitionMatrix:
    """
    The `N_t x N_t` transition probability matrix `P` of the per-path column random walk.

    Entry `entries[i, j]` is the probability that a path located at column `i` in a slot
    moves to column `j` in the next slot. The matrix is built with `build_banded_transition`
    and optionally mixed with the uniform law by `mix_uniform_appearance`.
    """

    entries: np.ndarray # The dense `N_t x N_t` row-stochastic matrix
    bandwidth: int      # The band half-width `B` used to build the matrix
    decay: float        # The exponential decay `β` used to build the matrix
    mix: float = 0.0    # The weight `λ` of the uniform (random appearance) component

    # Tolerance on the row sums
    ROW_SUM_TOLERANCE = 1e-12


    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=float)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ParameterError(f"Transition matrix must be square, got shape {entries.shape}.")
        if np.any(entries < 0):
            raise ParameterError("Transition matrix has negative entries.")
        if np.any(np.abs(entries.sum(axis=1) - 1.0) > TransitionMatrix.ROW_SUM_TOLERANCE):
            raise ParameterError("Transition matrix rows must sum to 1.")


    @property
    def size(self) -> int:
        """The number of columns `N_t` of the virtual channel matrix."""
        return self.entries.shape[0]


    def row(self, column: int) -> np.ndarray:
        """The distribution of the next column of a path currently at `column`."""
        return self.entries[column]


    def to_text(self, precision: int = 6) -> str:
        """Render the matrix as a plain dense block of text (one row per line), used for debugging."""
        header = f"# TransitionMatrix N_t={self.size} B={self.bandwidth} beta={self.decay} lambda={self.mix}"
        rows = [" ".join(f"{v:.{precision}f}" for v in r) for r in self.entries]
        return "\n".join([header, *rows])


    def __str__(self) -> str:
        return f"TransitionMatrix(N_t={self.size}, B={self.bandwidth}, beta={self.decay}, lambda={self.mix})"



def build_banded_transition(n_tx: int, bandwidth: int, decay: float) -> TransitionMatrix:
    """
    Build the banded transition matrix with exponential decay.

    Row `i` has unnormalized entries `β^|i-j|` for `|i-j| <= B` and zero elsewhere. Rows are
    normalized independently, so the band is simply truncated at the matrix edges and the
    corner rows keep the same relative decay shape.

    Args:
        n_tx (int): The number of columns `N_t` (at least 2).
        bandwidth (int): The band half-width `B`, with `0 <= B < N_t`.
        decay (float): The decay `β` in `[0, 1)`.

    Returns:
        TransitionMatrix: The row-stochastic banded matrix.

    Raises:
        ParameterError: If a parameter is out of range.
    """

    if n_tx < 2:
        raise ParameterError(f"The number of transmit antennas must be at least 2, got {n_tx}.")
    if not 0 <= bandwidth < n_tx:
        raise ParameterError(f"The bandwidth must be in [0, {n_tx}), got {bandwidth}.")
    if not 0.0 <= decay < 1.0:
        raise ParameterError(f"The decay must be in [0, 1), got {decay}.")

    idx = np.arange(n_tx)
    distance = np.abs(idx[:, None] - idx[None, :])
    # `0.0 ** 0 == 1` keeps the diagonal when the decay is zero
    weights = np.where(distance <= bandwidth, np.power(float(decay), distance), 0.0)
    entries = weights / weights.sum(axis=1, keepdims=True)
    return TransitionMatrix(entries=entries, bandwidth=bandwidth, decay=float(decay), mix=0.0)


def mix_uniform_appearance(transition: TransitionMatrix, mix: float) -> TransitionMatrix:
    """
    Mix a transition matrix with the uniform law, `(1-λ)P + λ/N_t`, to model paths appearing from arbitrary directions.

    Args:
        transition (TransitionMatrix): The matrix `P` to mix.
        mix (float): The weight `λ` in `[0, 1]`.

    Returns:
        TransitionMatrix: The mixed matrix, which keeps `B` and `β` of the input.

    Raises:
        ParameterError: If `λ` is out of range.
    """

    if not 0.0 <= mix <= 1.0:
        raise ParameterError(f"The uniform mixing weight must be in [0, 1], got {mix}.")
    n = transition.size
    entries = (1.0 - mix) * transition.entries + mix * np.full((n, n), 1.0 / n)
    return TransitionMatrix(entries=entries, bandwidth=transition.bandwidth, decay=transition.decay, mix=float(mix))


def transition_from_config(n_tx: int, bandwidth: int, decay: float, mix: float = 0.0) -> TransitionMatrix:
    """Build the banded matrix and apply the uniform mixing in one call."""
    return mix_uniform_appearance(build_banded_transition(n_tx, bandwidth, decay), mix)
