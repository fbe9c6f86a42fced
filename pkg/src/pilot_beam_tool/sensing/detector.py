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

from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from pilot_beam_tool.channel.model import ChannelState, ModelParams, assemble_vcm, bin_counts
from pilot_beam_tool.errors import ParameterError
from pilot_beam_tool.pomdp.enumeration import StateEnumeration
from pilot_beam_tool.sensing.observation import Action, Observation, observation_space


class ObservationMode(str, Enum):
    """How `simulate_observation` produces the detection flags."""

    SIGNAL = "signal"     # Complex filter-bank output followed by the per-element energy threshold
    ANALYTIC = "analytic" # Flags sampled directly from the column-level detection law



# Neyman-Pearson channel sensor
@dataclass(frozen=True)
class DetectorSpec:
    """
    The per-element energy detector applied by the receiver to the filter-bank output.

    The threshold fixes the false-alarm probability of a noise-only element; the miss
    probability follows from the path SNR. `p_md_multi` is the miss probability used by the
    reduced belief update, taken equal to `p_md`.
    """

    p_fa: float       # Per-element false-alarm probability `P_FA`
    threshold: float  # Energy threshold `τ`
    p_md: float       # Per-element miss probability `P_MD` of a single-path bin
    path_snr: float   # `N_t N_r P_t ξ² / σ_N²`
    p_md_multi: float # Miss probability `P'_MD` of the reduced update
    n_rx: int         # Number of filter-bank elements per sensed column
    noise_var: float  # `σ_N²`


    @property
    def is_perfect(self) -> bool:
        return self.p_fa == 0.0 and self.p_md == 0.0


    def column_quiet(self, n_bins: Union[int, np.ndarray]) -> Union[float, np.ndarray]:
        """
        The probability that no element of a sensed column fires, `(1-P_FA)^{N_r-n} P_MD^n`, given its number `n` of occupied bins.

        Works element-wise on integer arrays.
        """

        n_bins = np.asarray(n_bins)
        return np.power(1.0 - self.p_fa, self.n_rx - n_bins) * np.power(self.p_md, n_bins)


    @property
    def column_detection(self) -> float:
        """The probability that a column holding a single path is flagged, `1 - (1-P_FA)^{N_r-1} P_MD`."""
        return 1.0 - float(self.column_quiet(1))


    @property
    def column_miss_multi(self) -> float:
        """The column-level miss probability used by the reduced update, `(1-P_FA)^{N_r-1} P'_MD`."""
        return (1.0 - self.p_fa) ** (self.n_rx - 1) * self.p_md_multi


    @staticmethod
    def perfect(params: ModelParams) -> "DetectorSpec":
        """An ideal sensor (`P_FA = P_MD = 0`) whose flags equal the bin occupancy; only usable in analytic mode."""
        return DetectorSpec(p_fa=0.0, threshold=math.inf, p_md=0.0, path_snr=params.path_snr, p_md_multi=0.0, n_rx=params.n_rx, noise_var=params.noise_var)



def make_detector(p_fa: float, params: ModelParams) -> DetectorSpec:
    """
    Build the Neyman-Pearson detector of size `P_FA`.

    A noise-only element has an exponential energy law with mean `σ²`, so the threshold is
    `τ = -σ² ln P_FA`; a single-path element has mean `σ²(1 + SNR)`, hence
    `P_MD = 1 - exp(-τ / ((1 + SNR) σ²))`.

    Args:
        p_fa (float): The false-alarm probability in `(0, 1)`.
        params (ModelParams): The channel model.

    Returns:
        DetectorSpec: The calibrated detector.

    Raises:
        ParameterError: If `p_fa` is not in `(0, 1)`.
    """

    if not 0.0 < p_fa < 1.0:
        raise ParameterError(f"The false-alarm probability must be in (0, 1), got {p_fa}.")
    snr = params.path_snr
    threshold = -params.noise_var * math.log(p_fa)
    p_md = -math.expm1(-threshold / ((1.0 + snr) * params.noise_var))
    return DetectorSpec(p_fa=p_fa, threshold=threshold, p_md=p_md, path_snr=snr, p_md_multi=p_md, n_rx=params.n_rx, noise_var=params.noise_var)


def obs_prob_given_bins(column_bins: np.ndarray, observation: Observation, action: Action, detector: DetectorSpec) -> float:
    """The probability of `observation` when the sensed columns hold `column_bins` occupied bins (indexed by column)."""
    quiet = detector.column_quiet(column_bins[list(action.indices)])
    flags = np.asarray(observation.flags)
    return float(np.prod(np.where(flags == 1, 1.0 - quiet, quiet)))


def obs_prob_given_state(state_index: int, observation: Observation, action: Action, detector: DetectorSpec, enumeration: StateEnumeration) -> float:
    """
    The likelihood `q_ij^a` of observation `j` given the enumerated state `i` and the action.

    The flags of distinct sensed columns are independent given the state, each column being
    quiet with probability `(1-P_FA)^{N_r - N_bin} P_MD^{N_bin}`.
    """

    return obs_prob_given_bins(enumeration.bins_table[state_index], observation, action, detector)


def likelihood_matrix(quiet: np.ndarray) -> np.ndarray:
    """
    Expand per-beam quiet probabilities into the likelihood of every observation.

    Args:
        quiet (np.ndarray): Array `(..., M_p)` of `Pr{o_m = 0}`.

    Returns:
        np.ndarray: Array `(..., 2^{M_p})` of observation probabilities, ordered as `observation_space`.
    """

    space = observation_space(quiet.shape[-1])
    q = quiet[..., None, :]
    return np.prod(np.where(space == 1, 1.0 - q, q), axis=-1)


def draw_sensing_noise(params: ModelParams, rng: np.random.Generator) -> np.ndarray:
    """Draw the `N_t x N_r` complex noise of the whole filter bank (variance `σ²` per element, `σ²/2` per real dimension)."""
    scale = math.sqrt(params.noise_var / 2.0)
    shape = (params.n_tx, params.n_rx)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def simulate_observation(state: ChannelState, action: Action, detector: DetectorSpec, params: ModelParams,
                         rng: np.random.Generator, mode: ObservationMode = ObservationMode.SIGNAL) -> Observation:
    """
    Produce the detection flags fed back for the sensed columns of the (post-transition) state.

    In signal mode the filter-bank output `y' = sqrt(P_t) H̃(:, a_m) + n` of every sensed column is
    thresholded element-wise and the flag is raised when any element fires. In analytic mode the
    flags are sampled from the column-level law. The random draws cover every column of the
    filter bank whatever the action, so that two actions evaluated with generators in the same
    state see the same noise on the columns they share.

    Returns:
        Observation: The flags, in the order of `action.indices`.
    """

    columns = list(action.indices)
    if ObservationMode(mode) is ObservationMode.ANALYTIC:
        uniforms = rng.random(params.n_tx)
        quiet = detector.column_quiet(bin_counts(state.columns, state.rows, params.n_tx)[columns])
        return Observation(tuple((uniforms[columns] >= quiet).astype(int)))

    if detector.is_perfect:
        raise ParameterError("The perfect detector can only be used in analytic observation mode.")
    noise = draw_sensing_noise(params, rng)
    vcm = assemble_vcm(state, params)
    received = math.sqrt(params.tx_power) * vcm.entries[:, columns].T + noise[columns]
    fired = np.abs(received) ** 2 >= detector.threshold
    return Observation(tuple(fired.any(axis=1).astype(int)))


def estimate_gain(element: Union[complex, np.ndarray], detector: DetectorSpec, params: ModelParams) -> Union[complex, np.ndarray]:
    """
    Linear MMSE estimate of the bin gain `sqrt(N_t N_r) α` from a flagged filter-bank element.

    Under the prior `CN(0, N_t N_r ξ²)` the estimate is
    `sqrt(P_t) N_t N_r ξ² / (P_t N_t N_r ξ² + σ²) · y`; it tends to `y / sqrt(P_t)` without noise.
    Works element-wise on arrays of elements.
    """

    prior = params.array_gain * params.gain_var
    return math.sqrt(params.tx_power) * prior / (params.tx_power * prior + detector.noise_var) * element
