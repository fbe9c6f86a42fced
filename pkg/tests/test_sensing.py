# -*- coding: utf-8 -*-
"""Test actions, observations and the Neyman-Pearson channel sensor"""

import math
import unittest

from dataclasses import replace

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal
from scipy.special import comb

from pilot_beam_tool.channel.model import ChannelState, ModelParams, bin_counts, draw_gains
from pilot_beam_tool.errors import ParameterError
from pilot_beam_tool.pomdp.enumeration import StateEnumeration
from pilot_beam_tool.sensing.detector import (DetectorSpec, ObservationMode, draw_sensing_noise, estimate_gain,
                                              likelihood_matrix, make_detector, obs_prob_given_bins,
                                              obs_prob_given_state, simulate_observation)
from pilot_beam_tool.sensing.observation import Action, Observation, action_matrix, all_actions, observation_space


def assert_binomial_rate(case: unittest.TestCase, hits: int, trials: int, p: float) -> None:
    """The observed count lies within 3 standard deviations of its binomial mean"""
    sigma = math.sqrt(trials * p * (1 - p))
    case.assertLessEqual(abs(hits - trials * p), 3 * sigma, f"{hits}/{trials} against p={p}")


class TestActionsAndObservations(unittest.TestCase):

    def test_action_is_canonical(self) -> None:
        action = Action.of([5, 1, 3])
        self.assertEqual(action.indices, (1, 3, 5))
        self.assertEqual(action, Action((3, 5, 1)))
        self.assertIn(3, action)
        self.assertEqual(list(action), [1, 3, 5])
        with self.assertRaises(ParameterError):
            Action.of([1, 1])
        with self.assertRaises(ParameterError):
            Action.of([0, 8]).validate(8)

    def test_observation_index(self) -> None:
        """The first flag is the most significant bit"""

        self.assertEqual(Observation((1, 0, 0)).index, 4)
        self.assertEqual(Observation((0, 1, 1)).index, 3)
        self.assertEqual(Observation.from_index(5, 3).flags, (1, 0, 1))
        with self.assertRaises(ParameterError):
            Observation((0, 2))

    def test_observation_space(self) -> None:
        space = observation_space(3)
        self.assertEqual(space.shape, (8, 3))
        assert_array_equal(space[0], [0, 0, 0])
        assert_array_equal(space[6], [1, 1, 0])
        assert_array_equal(space[-1], [1, 1, 1])

    def test_all_actions(self) -> None:
        actions = all_actions(8, 4)
        self.assertEqual(len(actions), comb(8, 4, exact=True))
        self.assertEqual(actions[0].indices, (0, 1, 2, 3))
        self.assertEqual(actions[-1].indices, (4, 5, 6, 7))
        self.assertEqual(actions, sorted(actions))
        assert_array_equal(action_matrix(8, 4)[1], [0, 1, 2, 4])
        with self.assertRaises(ParameterError):
            all_actions(4, 5)


class TestDetectorCalibration(unittest.TestCase):

    def setUp(self) -> None:
        self.params = ModelParams(n_tx=8, n_rx=4, n_paths=2).with_path_snr(100.0)
        self.detector = make_detector(0.05, self.params)
        self.rng = np.random.default_rng(2024)

    def test_closed_form(self) -> None:
        self.assertAlmostEqual(self.detector.threshold, math.log(20.0))
        self.assertAlmostEqual(self.detector.p_md, 0.029225, places=6)
        self.assertAlmostEqual(self.detector.path_snr, 100.0)
        self.assertEqual(self.detector.p_md_multi, self.detector.p_md)

    def test_miss_probability_falls_with_snr(self) -> None:
        misses = [make_detector(0.05, self.params.with_path_snr(snr)).p_md for snr in (0.1, 1.0, 10.0, 100.0, 1000.0)]
        self.assertTrue(np.all(np.diff(misses) < 0), misses)
        self.assertTrue(all(0.0 < p < 1.0 for p in misses))

    def test_invalid_false_alarm(self) -> None:
        with self.assertRaises(ParameterError):
            make_detector(0.0, self.params)
        with self.assertRaises(ParameterError):
            make_detector(1.0, self.params)

    def test_empirical_false_alarm_rate(self) -> None:
        """Noise-only elements exceed the threshold with probability P_FA"""

        energies = np.concatenate([np.abs(draw_sensing_noise(self.params, self.rng)).ravel() ** 2 for _ in range(3125)])
        self.assertEqual(energies.size, 100000)
        assert_binomial_rate(self, int(np.sum(energies >= self.detector.threshold)), energies.size, 0.05)

    def test_empirical_miss_rate(self) -> None:
        """Elements holding one path stay below the threshold with probability P_MD"""

        many = replace(self.params, n_paths=100000)
        gains = draw_gains(many, self.rng)
        noise = math.sqrt(0.5) * (self.rng.standard_normal(100000) + 1j * self.rng.standard_normal(100000))
        received = math.sqrt(self.params.tx_power * self.params.array_gain) * gains + noise
        misses = int(np.sum(np.abs(received) ** 2 < self.detector.threshold))
        assert_binomial_rate(self, misses, 100000, 0.029225)

    def test_column_probabilities(self) -> None:
        quiet = self.detector.column_quiet(np.array([0, 1, 2]))
        assert_allclose(quiet, [0.95 ** 4, 0.95 ** 3 * self.detector.p_md, 0.95 ** 2 * self.detector.p_md ** 2])
        self.assertAlmostEqual(self.detector.column_detection, 1 - quiet[1])
        self.assertAlmostEqual(self.detector.column_miss_multi, quiet[1])

    def test_perfect_detector(self) -> None:
        perfect = DetectorSpec.perfect(self.params)
        self.assertTrue(perfect.is_perfect)
        assert_array_equal(perfect.column_quiet(np.array([0, 1, 2])), [1.0, 0.0, 0.0])


class TestObservationModel(unittest.TestCase):

    def setUp(self) -> None:
        self.params = ModelParams(n_tx=4, n_rx=4, n_paths=2).with_path_snr(10.0)
        self.detector = make_detector(0.1, self.params)
        self.enumeration = StateEnumeration(4, 2)

    def test_likelihoods_sum_to_one(self) -> None:
        action = Action.of([0, 2])
        total = sum(obs_prob_given_state(7, Observation.from_index(j, 2), action, self.detector, self.enumeration) for j in range(4))
        self.assertAlmostEqual(total, 1.0)

        quiet = np.random.default_rng(0).random((5, 3))
        assert_allclose(likelihood_matrix(quiet).sum(axis=1), np.ones(5))

    def test_observation_probability(self) -> None:
        """Flags of distinct columns are independent given the bins"""

        bins = np.array([1, 0, 2, 0])
        action = Action.of([0, 1])
        q1, q0 = self.detector.column_quiet(1), self.detector.column_quiet(0)
        self.assertAlmostEqual(obs_prob_given_bins(bins, Observation((1, 0)), action, self.detector), (1 - q1) * q0)
        self.assertAlmostEqual(obs_prob_given_bins(bins, Observation((0, 1)), action, self.detector), q1 * (1 - q0))

    def test_analytic_frequencies(self) -> None:
        state = ChannelState(columns=(1, 3), rows=(0, 2), gains=np.ones(2))
        action = Action.of([1, 2])
        rng = np.random.default_rng(11)
        flags = np.array([simulate_observation(state, action, self.detector, self.params, rng, ObservationMode.ANALYTIC).flags
                          for _ in range(20000)])
        assert_binomial_rate(self, int(flags[:, 0].sum()), 20000, 1 - float(self.detector.column_quiet(1)))
        assert_binomial_rate(self, int(flags[:, 1].sum()), 20000, 1 - float(self.detector.column_quiet(0)))

    def test_signal_mode_matches_column_law(self) -> None:
        """The filter-bank simulation flags a single-path column with the column detection probability"""

        state = ChannelState(columns=(1, 3), rows=(0, 2), gains=np.ones(2))
        action = Action.of([0, 1])
        rng = np.random.default_rng(12)
        hits = np.zeros(2, dtype=int)
        n = 20000
        for _ in range(n):
            live = ChannelState(columns=state.columns, rows=state.rows, gains=draw_gains(self.params, rng))
            hits += np.array(simulate_observation(live, action, self.detector, self.params, rng).flags)
        assert_binomial_rate(self, int(hits[0]), n, 1 - float(self.detector.column_quiet(0)))
        assert_binomial_rate(self, int(hits[1]), n, self.detector.column_detection)

    def test_signal_mode_joint_law(self) -> None:
        """Joint flags follow `q_ij^a`, including a column holding two paths in different rows"""

        state = ChannelState(columns=(1, 1), rows=(0, 2), gains=np.ones(2))
        action = Action.of([0, 1])
        bins = bin_counts(state.columns, state.rows, self.params.n_tx)
        self.assertEqual(bins[1], 2)

        rng = np.random.default_rng(13)
        n = 40000
        counts = np.zeros(4, dtype=int)
        for _ in range(n):
            live = ChannelState(columns=state.columns, rows=state.rows, gains=draw_gains(self.params, rng))
            counts[simulate_observation(live, action, self.detector, self.params, rng).index] += 1
        for j in range(4):
            assert_binomial_rate(self, int(counts[j]), n, obs_prob_given_bins(bins, Observation.from_index(j, 2), action, self.detector))

    def test_noise_is_drawn_for_every_column(self) -> None:
        """Two actions sharing a column see the same noise on it with generators in the same state"""

        state = ChannelState(columns=(0, 0), rows=(0, 1), gains=np.zeros(2))
        low = ModelParams(n_tx=4, n_rx=4, n_paths=2)
        detector = make_detector(0.5, low)
        for seed in range(20):
            a = simulate_observation(state, Action.of([1, 2]), detector, low, np.random.default_rng(seed))
            b = simulate_observation(state, Action.of([2, 3]), detector, low, np.random.default_rng(seed))
            self.assertEqual(a.flags[1], b.flags[0])

    def test_perfect_detector_needs_analytic_mode(self) -> None:
        state = ChannelState(columns=(1, 3), rows=(0, 2), gains=np.ones(2))
        perfect = DetectorSpec.perfect(self.params)
        rng = np.random.default_rng(0)
        with self.assertRaises(ParameterError):
            simulate_observation(state, Action.of([1, 2]), perfect, self.params, rng)
        observation = simulate_observation(state, Action.of([0, 1, 2, 3]), perfect, self.params, rng, ObservationMode.ANALYTIC)
        self.assertEqual(observation.flags, (0, 1, 0, 1))

    def test_gain_estimate(self) -> None:
        """Without noise the estimate tends to the bin gain"""

        params = ModelParams(n_tx=8, n_rx=4, n_paths=1, noise_var=1e-9)
        detector = make_detector(0.05, params)
        bin_gain = math.sqrt(32) * (0.4 + 0.2j)
        element = math.sqrt(params.tx_power) * bin_gain
        self.assertAlmostEqual(estimate_gain(element, detector, params), bin_gain, places=6)

    def test_gain_estimate_beats_naive_inversion(self) -> None:
        params = ModelParams(n_tx=8, n_rx=4, n_paths=1).with_path_snr(3.0)
        detector = make_detector(0.05, params)
        rng = np.random.default_rng(14)
        n = 100000
        bin_gains = math.sqrt(params.array_gain) * draw_gains(replace(params, n_paths=n), rng)
        noise = math.sqrt(params.noise_var / 2) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        elements = math.sqrt(params.tx_power) * bin_gains + noise

        mmse_error = np.mean(np.abs(estimate_gain(elements, detector, params) - bin_gains) ** 2)
        naive_error = np.mean(np.abs(elements / math.sqrt(params.tx_power) - bin_gains) ** 2)
        self.assertLess(mmse_error, naive_error)


if __name__ == "__main__":
    unittest.main()
