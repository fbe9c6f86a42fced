# -*- coding: utf-8 -*-
"""Test the per-path marginal belief and the greedy policy built on it"""

import unittest

import numpy as np
from numpy.testing import assert_allclose

from pilot_beam_tool.channel.model import ModelParams
from pilot_beam_tool.channel.transition import build_banded_transition, transition_from_config
from pilot_beam_tool.errors import ImpossibleObservationError, ParameterError
from pilot_beam_tool.pomdp.belief import BeliefModel, FullBelief
from pilot_beam_tool.pomdp.enumeration import StateEnumeration
from pilot_beam_tool.reduced.belief import ReducedBelief, expand_reduced_to_full, reduced_belief_update
from pilot_beam_tool.reduced.greedy import RewardMode, greedy_action, reduced_expected_reward, score_vector
from pilot_beam_tool.sensing.detector import DetectorSpec, make_detector
from pilot_beam_tool.sensing.observation import Action, Observation, all_actions
from pilot_beam_tool.utils.ranking import first_best


def random_reduced(rng: np.random.Generator, n_paths: int, n_tx: int) -> ReducedBelief:
    return ReducedBelief(rng.dirichlet(np.full(n_tx, 0.5), size=n_paths))


class TestSinglePathExactness(unittest.TestCase):
    """With one path the marginal belief is the full belief"""

    def setUp(self) -> None:
        self.params = ModelParams(n_tx=8, n_rx=4, n_paths=1).with_path_snr(10.0)
        self.transition = transition_from_config(8, 1, 0.5, 0.05)
        self.detector = make_detector(0.05, self.params)
        self.model = BeliefModel(StateEnumeration(8, 1), self.transition, self.detector)
        self.rng = np.random.default_rng(99)

    def test_update_matches_full_belief(self) -> None:
        actions = all_actions(8, 3)
        for _ in range(500):
            full = FullBelief.uniform(8)
            reduced = ReducedBelief.uniform(1, 8)
            for _ in range(10):
                action = actions[self.rng.integers(len(actions))]
                # Draw the observation from its predictive law under the current belief
                gammas = np.array([self.model.obs_likelihood(full, action, Observation.from_index(j, 3)) for j in range(8)])
                observation = Observation.from_index(int(self.rng.choice(8, p=gammas / gammas.sum())), 3)
                full = self.model.belief_update(full, action, observation)
                reduced = reduced_belief_update(reduced, action, observation, self.transition, self.detector)
                assert_allclose(reduced.marginals[0], full.probs, atol=1e-10)

    def test_expected_reward_matches_full_belief(self) -> None:
        reduced = random_reduced(self.rng, 1, 8)
        full = expand_reduced_to_full(reduced)
        action = Action.of([1, 4, 6])
        exact = reduced_expected_reward(reduced, action, self.transition, RewardMode.EXACT, self.detector)
        self.assertAlmostEqual(exact, self.model.expected_reward_belief(full, action))


class TestGreedyAction(unittest.TestCase):

    def setUp(self) -> None:
        self.transition = build_banded_transition(8, 1, 0.5)
        self.rng = np.random.default_rng(5)

    def test_matches_exhaustive_search(self) -> None:
        """Sorting `P'ω` finds the action maximizing the zero-miss reward"""

        actions = all_actions(8, 4)
        for _ in range(1000):
            belief = random_reduced(self.rng, 2, 8)
            values = np.array([reduced_expected_reward(belief, a, self.transition) for a in actions])
            self.assertEqual(greedy_action(belief, self.transition, 4), actions[first_best(values)])

    def test_exact_reward_is_scaled(self) -> None:
        params = ModelParams(n_tx=8, n_rx=4, n_paths=2).with_path_snr(100.0)
        detector = make_detector(0.05, params)
        self.assertAlmostEqual(detector.column_detection, 0.974943, delta=1e-6)
        belief = random_reduced(self.rng, 2, 8)
        action = Action.of([0, 3, 4, 7])
        zero_miss = reduced_expected_reward(belief, action, self.transition)
        exact = reduced_expected_reward(belief, action, self.transition, RewardMode.EXACT, detector)
        self.assertAlmostEqual(exact, detector.column_detection * zero_miss)
        with self.assertRaises(ParameterError):
            reduced_expected_reward(belief, action, self.transition, RewardMode.EXACT)

    def test_score_vector_mass(self) -> None:
        belief = random_reduced(self.rng, 3, 8)
        scores = score_vector(belief, self.transition)
        self.assertAlmostEqual(float(scores.sum()), 3.0)
        self.assertAlmostEqual(reduced_expected_reward(belief, Action.of(range(8)), self.transition), 3.0)

    def test_point_mass_with_identity_dynamics(self) -> None:
        identity = build_banded_transition(8, 0, 0.5)
        belief = ReducedBelief.point_mass([2, 5], 8)
        self.assertEqual(greedy_action(belief, identity, 2), Action.of([2, 5]))
        self.assertEqual(greedy_action(belief, identity, 3), Action.of([0, 2, 5]))

    def test_invalid_beam_count(self) -> None:
        with self.assertRaises(ParameterError):
            greedy_action(ReducedBelief.uniform(2, 8), self.transition, 9)


class TestReducedUpdate(unittest.TestCase):

    def setUp(self) -> None:
        self.params = ModelParams(n_tx=8, n_rx=4, n_paths=2).with_path_snr(10.0)
        self.transition = build_banded_transition(8, 1, 0.5)
        self.detector = make_detector(0.05, self.params)

    def loop_update(self, belief: ReducedBelief, action: Action, observation: Observation,
                    transition: np.ndarray, detector: DetectorSpec) -> np.ndarray:
        """Symbol by symbol: the own column misses at column level, other columns mix in the other paths"""

        n_paths, n_tx = belief.marginals.shape
        quiet_empty = (1 - detector.p_fa) ** detector.n_rx
        miss = (1 - detector.p_fa) ** (detector.n_rx - 1) * detector.p_md
        posterior = np.zeros((n_paths, n_tx))
        for path in range(n_paths):
            for i in range(n_tx):
                prior = sum(belief.marginals[path, n] * transition[n, i] for n in range(n_tx))
                likelihood = 1.0
                for column, flag in zip(action.indices, observation.flags):
                    if column == i:
                        quiet = miss
                    else:
                        z = 1.0
                        for other in range(n_paths):
                            if other != path:
                                z *= sum(belief.marginals[other, t] * (1 - transition[t, column]) for t in range(n_tx))
                        quiet = z * quiet_empty + (1 - z) * miss
                    likelihood *= (1 - quiet) if flag else quiet
                posterior[path, i] = prior * likelihood
            posterior[path] /= posterior[path].sum()
        return posterior

    def test_two_paths_match_loop_update(self) -> None:
        params = ModelParams(n_tx=4, n_rx=4, n_paths=2).with_path_snr(10.0)
        transition = build_banded_transition(4, 1, 0.5)
        detector = make_detector(0.1, params)
        rng = np.random.default_rng(41)
        actions = all_actions(4, 2)
        for _ in range(200):
            belief = random_reduced(rng, 2, 4)
            action = actions[rng.integers(len(actions))]
            observation = Observation.from_index(int(rng.integers(4)), 2)
            updated = reduced_belief_update(belief, action, observation, transition, detector)
            assert_allclose(updated.marginals, self.loop_update(belief, action, observation, transition.entries, detector), atol=1e-12)

    def test_perfect_sensor_rules_out_column(self) -> None:
        params = ModelParams(n_tx=4, n_rx=4, n_paths=1)
        belief = reduced_belief_update(ReducedBelief.uniform(1, 4), Action.of([1]), Observation((0,)),
                                       build_banded_transition(4, 0, 0.5), DetectorSpec.perfect(params))
        assert_allclose(belief.marginals[0], [1 / 3, 0.0, 1 / 3, 1 / 3], atol=1e-12)

    def test_rows_stay_normalized(self) -> None:
        rng = np.random.default_rng(8)
        belief = ReducedBelief.uniform(2, 8)
        for _ in range(20):
            action = Action.of(rng.choice(8, size=4, replace=False))
            observation = Observation(tuple(int(f) for f in rng.integers(0, 2, size=4)))
            belief = reduced_belief_update(belief, action, observation, self.transition, self.detector)
            assert_allclose(belief.marginals.sum(axis=1), np.ones(2), atol=1e-12)

    def test_detection_sharpens_belief(self) -> None:
        belief = ReducedBelief.uniform(2, 8)
        updated = reduced_belief_update(belief, Action.of([3]), Observation((1,)), self.transition, self.detector)
        self.assertGreater(updated.marginals[0, 3], 1 / 8)
        updated = reduced_belief_update(belief, Action.of([3]), Observation((0,)), self.transition, self.detector)
        self.assertLess(updated.marginals[0, 3], 1 / 8)

    def test_impossible_observation(self) -> None:
        perfect = DetectorSpec.perfect(self.params)
        identity = build_banded_transition(8, 0, 0.5)
        belief = ReducedBelief.point_mass([1, 6], 8)
        with self.assertRaises(ImpossibleObservationError):
            reduced_belief_update(belief, Action.of([1, 6]), Observation((0, 0)), identity, perfect)
        kept = reduced_belief_update(belief, Action.of([1, 6]), Observation((1, 1)), identity, perfect)
        assert_allclose(kept.marginals, belief.marginals)

    def test_expand_to_full(self) -> None:
        belief = ReducedBelief(np.array([[0.5, 0.5, 0.0, 0.0], [0.0, 0.0, 0.25, 0.75]]))
        full = expand_reduced_to_full(belief)
        enumeration = StateEnumeration(4, 2)
        self.assertAlmostEqual(full.probs[enumeration.to_index((1, 3))], 0.375)
        self.assertAlmostEqual(full.probs[enumeration.to_index((0, 2))], 0.125)
        self.assertEqual(full.probs[enumeration.to_index((2, 2))], 0.0)

    def test_invalid_belief(self) -> None:
        with self.assertRaises(ParameterError):
            ReducedBelief(np.array([[0.5, 0.4]]))
        with self.assertRaises(ParameterError):
            ReducedBelief(np.array([0.5, 0.5]))


if __name__ == "__main__":
    unittest.main()
