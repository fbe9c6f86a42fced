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
import math

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from pilot_beam_tool.harness.config import ExperimentConfig
from pilot_beam_tool.harness.worker import TrialRunner


logger = logging.getLogger(__name__)


# Normal quantile of the two-sided 95% confidence interval
Z_95 = 1.96

# Columns of the long-format results table
RESULT_COLUMNS = ("preset", "policy", "slot", "mean_reward", "acc_reward", "ci95", "n_trials")



def ci95_half_width(samples: np.ndarray, axis: int = 0) -> np.ndarray:
    """Normal-approximation half-width `1.96 s / sqrt(n)` along `axis`; zero with a single sample."""
    n = samples.shape[axis]
    if n < 2:
        return np.zeros(np.delete(samples.shape, axis))
    return Z_95 * np.std(samples, axis=axis, ddof=1) / math.sqrt(n)



@dataclass(frozen=True)
class AggregateResult:
    """
    Monte Carlo statistics of every policy of an experiment.

    All arrays have shape `P x T` (policy, slot); the accumulated statistics refer to the sum of
    the rewards of slots `1..k` of each trial.
    """

    name: str
    policies: Tuple[str, ...]
    mean_reward: np.ndarray # Per-slot mean reward
    ci95: np.ndarray        # Half-width of the 95% interval of the per-slot mean
    acc_reward: np.ndarray  # Mean accumulated reward
    acc_ci95: np.ndarray    # Half-width of the 95% interval of the accumulated mean
    n_trials: int


    @staticmethod
    def from_rewards(name: str, policies: Tuple[str, ...], rewards: np.ndarray) -> "AggregateResult":
        """Aggregate the `n x P x T` per-slot rewards of `n` trials."""
        accumulated = np.cumsum(rewards, axis=2)
        return AggregateResult(name=name, policies=tuple(policies),
                               mean_reward=rewards.mean(axis=0), ci95=ci95_half_width(rewards),
                               acc_reward=accumulated.mean(axis=0), acc_ci95=ci95_half_width(accumulated),
                               n_trials=int(rewards.shape[0]))


    @property
    def slots(self) -> int:
        return self.mean_reward.shape[1]


    def index_of(self, policy: str) -> int:
        return self.policies.index(policy)


    def slot_average(self, policy: str, first_slot: int = 0) -> float:
        """The per-slot mean reward of `policy` averaged over slots `first_slot..T-1` (0-based)."""
        return float(self.mean_reward[self.index_of(policy), first_slot:].mean())


    def to_frame(self, preset: Optional[str] = None) -> pd.DataFrame:
        """The long-format table, one row per policy and slot (1-based); `ci95` refers to the per-slot mean."""
        rows = []
        for p, policy in enumerate(self.policies):
            for k in range(self.slots):
                rows.append((preset or self.name, policy, k + 1, float(self.mean_reward[p, k]),
                             float(self.acc_reward[p, k]), float(self.ci95[p, k]), self.n_trials))
        return pd.DataFrame(rows, columns=list(RESULT_COLUMNS))



def monte_carlo(config: ExperimentConfig, n_workers: Optional[int] = None, show_progress: bool = False) -> AggregateResult:
    """
    Run `config.n_trials` trials of every policy with common random numbers and aggregate them.

    Trial `t` uses the streams derived from `(config.seed, t)` whatever the worker that runs it, so
    the result is reproducible bit for bit and independent of `n_workers`.
    """

    labels = tuple(s.label for s in config.policy_specs())
    rewards = TrialRunner(config, n_workers=n_workers, show_progress=show_progress).run()
    result = AggregateResult.from_rewards(config.name, labels, rewards)
    for p, label in enumerate(labels):
        logger.info(f"{config.name} / {label}: mean per-slot reward {result.mean_reward[p].mean():.4f}, "
                    f"accumulated {result.acc_reward[p, -1]:.4f} ± {result.acc_ci95[p, -1]:.4f}.")
    return result
