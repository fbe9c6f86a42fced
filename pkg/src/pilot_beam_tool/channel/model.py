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

import math

from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np

from pilot_beam_tool.channel.transition import TransitionMatrix
from pilot_beam_tool.errors import ParameterError


@dataclass(frozen=True)
class ModelParams:
    """The physical parameters of the sparse MIMO channel and of the pilot transmission."""

    n_tx: int              # Number of transmit antennas `N_t`, i.e., the VCM columns (AoD bins)
    n_rx: int              # Number of receive antennas `N_r`, i.e., the VCM rows (AoA bins)
    n_paths: int           # Number of propagation paths `L`
    gain_var: float = 1.0  # Variance `ξ²` of the complex path gains
    noise_var: float = 1.0 # Variance `σ_N²` of each complex filter-bank noise element
    tx_power: float = 1.0  # Pilot transmit power `P_t`


    def __post_init__(self) -> None:
        if self.n_tx < 2:
            raise ParameterError(f"`n_tx` must be at least 2, got {self.n_tx}.")
        if self.n_rx < 1:
            raise ParameterError(f"`n_rx` must be at least 1, got {self.n_rx}.")
        if self.n_paths < 1:
            raise ParameterError(f"`n_paths` must be at least 1, got {self.n_paths}.")
        for name in ("gain_var", "noise_var", "tx_power"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"`{name}` must be strictly positive, got {getattr(self, name)}.")


    @property
    def array_gain(self) -> int:
        """The beamforming gain `N_t N_r` of a grid-aligned path."""
        return self.n_tx * self.n_rx


    @property
    def path_snr(self) -> float:
        """The post-beamforming SNR of a single path, `N_t N_r P_t ξ² / σ_N²`."""
        return self.array_gain * self.tx_power * self.gain_var / self.noise_var


    def with_path_snr(self, path_snr: float) -> "ModelParams":
        """Return a copy whose transmit power is set so that `path_snr` equals the given (linear) value."""
        if not path_snr > 0:
            raise ParameterError(f"The path SNR must be strictly positive, got {path_snr}.")
        tx_power = path_snr * self.noise_var / (self.array_gain * self.gain_var)
        return replace(self, tx_power=tx_power)


    @staticmethod
    def db_to_linear(value_db: float) -> float:
        return 10.0 ** (value_db / 10.0)



# The hidden state of the POMDP: where each path is, plus the current gains
@dataclass(frozen=True)
class ChannelState:
    """
    The multipath state of one slot.

    Column (AoD) indices move across slots following the transition matrix, row (AoA) indices
    are fixed for an episode and gains are drawn again at every slot. Indices are 0-based.
    """

    columns: Tuple[int, ...] # The column index of each path (length `L`)
    rows: Tuple[int, ...]    # The row index of each path (length `L`), fixed per episode
    gains: np.ndarray        # The complex gain `α_l` of each path in this slot (length `L`)


    def __post_init__(self) -> None:
        object.__setattr__(self, "columns", tuple(int(c) for c in self.columns))
        object.__setattr__(self, "rows", tuple(int(r) for r in self.rows))
        gains = np.array(self.gains, dtype=complex)
        gains.setflags(write=False)
        object.__setattr__(self, "gains", gains)
        if not (len(self.columns) == len(self.rows) == gains.shape[0]):
            raise ParameterError("`columns`, `rows` and `gains` must all have one entry per path.")
        if not np.all(np.isfinite(gains)):
            raise ParameterError("Path gains must be finite.")


    @property
    def n_paths(self) -> int:
        return len(self.columns)


    def validate(self, params: ModelParams) -> None:
        """Check that every index lies in the grid defined by `params`."""
        if self.n_paths != params.n_paths:
            raise ParameterError(f"State has {self.n_paths} paths, the model has {params.n_paths}.")
        if any(not 0 <= c < params.n_tx for c in self.columns):
            raise ParameterError(f"Column index out of range in {self.columns}.")
        if any(not 0 <= r < params.n_rx for r in self.rows):
            raise ParameterError(f"Row index out of range in {self.rows}.")


    def __str__(self) -> str:
        return f"ChannelState(columns={list(self.columns)}, rows={list(self.rows)})"



@dataclass(frozen=True)
class VirtualChannelMatrix:
    """The `N_r x N_t` angle-domain channel `H̃`; at most `L` of its bins are structurally non-zero."""

    entries: np.ndarray # Complex `N_r x N_t` matrix


    def occupied_bins(self) -> Tuple[Tuple[int, int], ...]:
        """The `(row, column)` bins with a non-zero value."""
        rows, cols = np.nonzero(self.entries)
        return tuple(zip(rows.tolist(), cols.tolist()))


    def column(self, index: int) -> np.ndarray:
        return self.entries[:, index]



def draw_gains(params: ModelParams, rng: np.random.Generator) -> np.ndarray:
    """Draw `L` i.i.d. circularly-symmetric complex Gaussian gains with variance `ξ²`."""
    scale = math.sqrt(params.gain_var / 2.0)
    return scale * (rng.standard_normal(params.n_paths) + 1j * rng.standard_normal(params.n_paths))


def initial_state(params: ModelParams, rng: np.random.Generator, columns: Optional[Sequence[int]] = None) -> ChannelState:
    """
    Draw the state of the first slot of an episode.

    Args:
        params (ModelParams): The channel model.
        rng (np.random.Generator): The random generator.
        columns (Optional[Sequence[int]]): Fixed starting columns; drawn uniformly (and independently, so
            paths may share a column) when None.

    Returns:
        ChannelState: A state with uniformly drawn fixed rows and fresh gains.
    """

    if columns is None:
        columns = rng.integers(0, params.n_tx, size=params.n_paths)
    rows = rng.integers(0, params.n_rx, size=params.n_paths)
    state = ChannelState(columns=tuple(columns), rows=tuple(rows), gains=draw_gains(params, rng))
    state.validate(params)
    return state


def step_state(state: ChannelState, transition: TransitionMatrix, params: ModelParams, rng: np.random.Generator) -> ChannelState:
    """
    Move every path independently to its next column and redraw the gains.

    Each column is sampled from the row of `P` of the current column; rows are kept.

    Args:
        state (ChannelState): The current state.
        transition (TransitionMatrix): The matrix `P`.
        params (ModelParams): The channel model (used for the gain variance).
        rng (np.random.Generator): The random generator.

    Returns:
        ChannelState: The state of the next slot.
    """

    columns = tuple(int(rng.choice(transition.size, p=transition.row(c))) for c in state.columns)
    return ChannelState(columns=columns, rows=state.rows, gains=draw_gains(params, rng))


def bin_counts(columns: Sequence[int], rows: Optional[Sequence[int]], n_tx: int) -> np.ndarray:
    """
    Count the occupied VCM bins in every column.

    Two paths in the same column and row share one bin. When `rows` is None every path is
    counted as its own bin, which is the convention of the planning model (rows are not part
    of the enumerated state).

    Returns:
        np.ndarray: Integer vector of length `n_tx`.
    """

    counts = np.zeros(n_tx, dtype=int)
    if rows is None:
        np.add.at(counts, np.asarray(columns, dtype=int), 1)
        return counts
    for column, _ in set(zip(columns, rows)):
        counts[column] += 1
    return counts


def assemble_vcm(state: ChannelState, params: ModelParams) -> VirtualChannelMatrix:
    """Place `sqrt(N_t N_r) α_l` at bin `(row_l, column_l)` of every path; gains of paths sharing a bin add up."""
    entries = np.zeros((params.n_rx, params.n_tx), dtype=complex)
    scale = math.sqrt(params.array_gain)
    for row, column, gain in zip(state.rows, state.columns, state.gains):
        entries[row, column] += scale * gain
    return VirtualChannelMatrix(entries=entries)
