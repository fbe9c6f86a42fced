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
from typing import Optional, Tuple

import numpy as np

from pilot_beam_tool.channel.model import ChannelState, ModelParams, bin_counts, initial_state, step_state
from pilot_beam_tool.channel.transition import TransitionMatrix
from pilot_beam_tool.harness.config import ExperimentConfig, InitMode
from pilot_beam_tool.policies.base import InitialKnowledge, Policy
from pilot_beam_tool.policies.factory import PolicyContext, make_policies
from pilot_beam_tool.pomdp.reward import RewardSpec, immediate_reward
from pilot_beam_tool.sensing.detector import DetectorSpec, ObservationMode, simulate_observation
from pilot_beam_tool.sensing.observation import Action, Observation


# Streams of a trial; the channel stream is shared by all the policies
CHANNEL_STREAM = 0
POLICY_STREAM = 1
SENSING_STREAM = 2



@dataclass(frozen=True)
class TrialSeeds:
    """
    The random streams of one trial, derived from the master seed by counter.

    Every stream is a `SeedSequence` child keyed by `(trial, stream[, slot])`, so a trial can be
    replayed alone and all the policies of a trial face the same channel trajectory and the same
    sensing noise at every slot (common random numbers).
    """

    seed: int
    trial: int


    def _generator(self, *key: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(entropy=self.seed, spawn_key=(self.trial, *key)))


    def channel(self) -> np.random.Generator:
        return self._generator(CHANNEL_STREAM)


    def policy(self) -> np.random.Generator:
        return self._generator(POLICY_STREAM)


    def sensing(self, slot: int) -> np.random.Generator:
        return self._generator(SENSING_STREAM, slot)



@dataclass(frozen=True)
class SlotRecord:
    slot: int                 # 0-based slot index
    state: ChannelState       # The true (post-transition) state of the slot
    action: Action
    observation: Observation
    sensed_bins: Tuple[int, ...] # True occupied bins of the sensed columns, in the order of the action
    reward: float



@dataclass(frozen=True)
class EpisodeTrace:
    """The per-slot records of one policy on one trial."""

    policy: str
    trial: int
    initial: ChannelState
    records: Tuple[SlotRecord, ...]


    @property
    def rewards(self) -> np.ndarray:
        return np.array([r.reward for r in self.records])


    @property
    def accumulated_reward(self) -> float:
        return float(self.rewards.sum())


    def __len__(self) -> int:
        return len(self.records)



class Experiment:
    """An `ExperimentConfig` made runnable: model objects and policies are built once and reused by every trial."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.params: ModelParams = config.model_params()
        self.transition: TransitionMatrix = config.transition_matrix()
        self.detector: DetectorSpec = config.detector()
        self.reward: RewardSpec = config.reward_spec()
        self.mode: ObservationMode = config.observation_mode
        context = PolicyContext(params=self.params, transition=self.transition, detector=self.detector,
                                m_p=config.m_p, slots=config.slots, reward=self.reward)
        self.policies: Tuple[Policy, ...] = make_policies(config.policy_specs(), context)


    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(p.label for p in self.policies)


    def draw_trajectory(self, seeds: TrialSeeds) -> Tuple[ChannelState, ...]:
        """The initial state followed by the state of each of the `T` slots."""
        rng = seeds.channel()
        states = [initial_state(self.params, rng)]
        for _ in range(self.config.slots):
            states.append(step_state(states[-1], self.transition, self.params, rng))
        return tuple(states)


    def run_episode(self, policy: Policy, trial: int, trajectory: Optional[Tuple[ChannelState, ...]] = None) -> EpisodeTrace:
        """
        Play one episode of `policy` on trial `trial`.

        At every slot the true state moves, the policy picks the pilot beams from its internal
        state, the receiver feeds back the detection flags and the policy updates. The realized
        reward counts the true occupied bins of the flagged columns.
        """

        seeds = TrialSeeds(self.config.seed, trial)
        if trajectory is None:
            trajectory = self.draw_trajectory(seeds)
        knowledge = InitialKnowledge(trajectory[0].columns) if self.config.init_mode is InitMode.KNOWN else InitialKnowledge()
        state = policy.initial_state(knowledge)
        rng = seeds.policy()

        records = []
        for slot in range(self.config.slots):
            true_state = trajectory[slot + 1]
            action = policy.choose(state, slot, rng)
            observation = simulate_observation(true_state, action, self.detector, self.params, seeds.sensing(slot), self.mode)
            sensed = bin_counts(true_state.columns, true_state.rows, self.params.n_tx)[list(action.indices)]
            reward = immediate_reward(sensed, observation, self.reward)
            records.append(SlotRecord(slot=slot, state=true_state, action=action, observation=observation,
                                      sensed_bins=tuple(int(b) for b in sensed), reward=reward))
            state = policy.observe(state, action, observation)
        return EpisodeTrace(policy=policy.label, trial=trial, initial=trajectory[0], records=tuple(records))


    def run_trial(self, trial: int) -> np.ndarray:
        """The `P x T` per-slot rewards of every policy on the same trajectory."""
        trajectory = self.draw_trajectory(TrialSeeds(self.config.seed, trial))
        return np.stack([self.run_episode(p, trial, trajectory).rewards for p in self.policies])



def run_episode(config: ExperimentConfig, policy: Policy, trial: int = 0) -> EpisodeTrace:
    """Play a single episode of `policy` under `config`; the channel of trial `trial` is derived from `config.seed`."""
    return Experiment(config).run_episode(policy, trial)
