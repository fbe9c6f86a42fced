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
from typing import Sequence

import numpy as np

from pilot_beam_tool.channel.transition import TransitionMatrix
from pilot_beam_tool.errors import ImpossibleObservationError, ParameterError
from pilot_beam_tool.pomdp.belief import FullBelief
from pilot_beam_tool.sensing.detector import DetectorSpec
from pilot_beam_tool.sensing.observation import Action, Observation


# Per-path marginal posteriors, the reduced sufficient statistic of the greedy policy
@dataclass(frozen=True)
class ReducedBelief:
    """
    The `L x N_t` matrix `ω`; row `l` is the (pre-transition) posterior of the column of path `l`.

    Each row sums to one, so the total mass is `L`.
    """

    marginals: np.ndarray

    MASS_TOLERANCE = 1e-10


    def __post_init__(self) -> None:
        marginals = np.array(self.marginals, dtype=float)
        if marginals.ndim != 2 or np.any(marginals < 0):
            raise ParameterError("A reduced belief must be a non-negative `L x N_t` matrix.")
        if np.any(np.abs(marginals.sum(axis=1) - 1.0) > ReducedBelief.MASS_TOLERANCE):
            raise ParameterError("Every row of a reduced belief must sum to 1.")
        marginals.setflags(write=False)
        object.__setattr__(self, "marginals", marginals)


    @property
    def n_paths(self) -> int:
        return self.marginals.shape[0]


    @property
    def n_tx(self) -> int:
        return self.marginals.shape[1]


    @staticmethod
    def uniform(n_paths: int, n_tx: int) -> "ReducedBelief":
        return ReducedBelief(np.full((n_paths, n_tx), 1.0 / n_tx))


    @staticmethod
    def point_mass(columns: Sequence[int], n_tx: int) -> "ReducedBelief":
        marginals = np.zeros((len(columns), n_tx))
        marginals[np.arange(len(columns)), list(columns)] = 1.0
        return ReducedBelief(marginals)



def quiet_given_path(belief: ReducedBelief, action: Action, path: int, transition: TransitionMatrix, detector: DetectorSpec) -> np.ndarray:
    """
    The `N_t x M_p` probabilities `Pr{o_m = 0 | path l at column i}` of the reduced update.

    When the `m`-th beam senses the column of path `l` the column misses with the column-level miss
    probability; otherwise the column is quiet if no other path moved into it and no element
    raised a false alarm, or if some other path is there but is missed.
    """

    columns = list(action.indices)
    column_quiet_empty = (1.0 - detector.p_fa) ** detector.n_rx
    column_miss = detector.column_miss_multi

    others = [s for s in range(belief.n_paths) if s != path]
    # `Σ_t ω_{s,t} (1 - p_{t,a_m})` for every other path `s` and beam `m`
    away = belief.marginals[others] @ (1.0 - transition.entries[:, columns])
    no_other = np.prod(away, axis=0)
    quiet_elsewhere = no_other * column_quiet_empty + (1.0 - no_other) * column_miss

    quiet = np.tile(quiet_elsewhere, (belief.n_tx, 1))
    quiet[columns, np.arange(len(columns))] = column_miss
    return quiet


def reduced_belief_update(belief: ReducedBelief, action: Action, observation: Observation,
                          transition: TransitionMatrix, detector: DetectorSpec) -> ReducedBelief:
    """
    Update every path marginal with its own Bayes rule, the other paths entering only through their marginals.

    Args:
        belief (ReducedBelief): The pre-transition marginals `ω_k`.
        action (Action): The sensed columns.
        observation (Observation): The received flags.
        transition (TransitionMatrix): The matrix `P`.
        detector (DetectorSpec): The channel sensor.

    Returns:
        ReducedBelief: The marginals `ω_{k+1}` of the post-transition state.

    Raises:
        ImpossibleObservationError: If the observation has zero probability for some path.
    """

    flags = np.asarray(observation.flags)
    predicted = belief.marginals @ transition.entries
    updated = np.empty_like(predicted)
    for path in range(belief.n_paths):
        quiet = quiet_given_path(belief, action, path, transition, detector)
        likelihood = np.prod(np.where(flags == 1, 1.0 - quiet, quiet), axis=1)
        joint = predicted[path] * likelihood
        total = joint.sum()
        if not total > 0.0:
            raise ImpossibleObservationError(f"Observation {observation} has zero probability for path {path} with {action}.")
        updated[path] = joint / total
    return ReducedBelief(updated)


def expand_reduced_to_full(belief: ReducedBelief) -> FullBelief:
    """The product belief `π_n = Π_l ω_{l, i_l(n)}`, in the ordering of `StateEnumeration`."""
    probs = np.ones(1)
    for row in belief.marginals:
        probs = np.kron(probs, row)
    return FullBelief(probs / probs.sum())
