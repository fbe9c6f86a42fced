# -*- coding: utf-8 -*-
"""Test the experiment configuration, the episode loop and the Monte Carlo aggregation"""

import os
import tempfile
import time
import unittest

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from pilot_beam_tool.channel.model import bin_counts
from pilot_beam_tool.channel.transition import build_banded_transition
from pilot_beam_tool.errors import ConfigurationError
from pilot_beam_tool.harness.config import (InitMode, parse_override, preset_experiments, preset_names, resolve_config,
                                            unflatten, validate_config)
from pilot_beam_tool.harness.episode import Experiment, TrialSeeds, run_episode
from pilot_beam_tool.harness.montecarlo import RESULT_COLUMNS, AggregateResult, ci95_half_width, monte_carlo
from pilot_beam_tool.harness.worker import TrialRunner
from pilot_beam_tool.pomdp.reward import RewardKind
from pilot_beam_tool.reduced.belief import ReducedBelief
from pilot_beam_tool.reduced.greedy import greedy_action
from pilot_beam_tool.sensing.detector import ObservationMode

from tests import SLOW_TESTS


def small_config(**overrides):
    """The fig5b setup with few trials; `overrides` are dotted keys."""
    changes = {"n_trials": 20, "policies": ["greedy-full", "greedy-reduced", "random"]}
    changes.update(overrides)
    return preset_experiments("fig5b").with_overrides(**changes)


class TestConfiguration(unittest.TestCase):

    def setUp(self) -> None:
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self) -> None:
        self.tmp.cleanup()

    def write_file(self, text: str) -> str:
        path = os.path.join(self.tmp.name, "experiment.yaml")
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        return path

    def test_presets(self) -> None:
        self.assertTrue({"fig5a", "fig5b", "fig5a-09", "fig5b-09", "fig6", "fig7", "fig8"} <= set(preset_names()))
        fig7 = preset_experiments("fig7")
        self.assertEqual((fig7.model.n_tx, fig7.model.n_rx, fig7.model.n_paths), (64, 16, 2))
        self.assertEqual((fig7.transition.bandwidth, fig7.sensing.p_fa, fig7.m_p, fig7.slots), (8, 0.01, 10, 30))
        self.assertEqual(fig7.n_trials, 500)
        fig5a = preset_experiments("fig5a")
        self.assertIs(fig5a.init_mode, InitMode.UNIFORM)
        self.assertEqual(fig5a.policies, ("lookahead(2)", "greedy-full", "greedy-reduced", "random"))
        self.assertAlmostEqual(fig5a.model_params().path_snr, 100.0)
        self.assertEqual(preset_experiments("fig5b-09").transition.decay, 0.9)

    def test_mixing_presets(self) -> None:
        for name in ("fig6", "fig7"):
            base, mixed = preset_experiments(name), preset_experiments(f"{name}-mix")
            self.assertEqual(base.transition.mix, 0.0)
            self.assertEqual(mixed.transition.mix, 0.1)
            self.assertEqual(mixed.with_overrides(**{"transition.mix": 0.0, "name": name}), base)
            self.assertTrue(np.all(mixed.transition_matrix().entries > 0))

    def test_unknown_preset(self) -> None:
        with self.assertRaises(ConfigurationError) as context:
            preset_experiments("fig9")
        self.assertEqual(context.exception.key, "preset")

    def test_unknown_key_is_named(self) -> None:
        tree = preset_experiments("fig5b").model_dump(mode="json")
        tree["model"]["foo"] = 1
        with self.assertRaises(ConfigurationError) as context:
            validate_config(tree)
        self.assertEqual(context.exception.key, "model.foo")
        self.assertIn("model.foo", str(context.exception))

    def test_invalid_values_are_named(self) -> None:
        with self.assertRaises(ConfigurationError) as context:
            small_config(m_p=9)
        self.assertEqual(context.exception.key, "m_p")
        with self.assertRaises(ConfigurationError) as context:
            small_config(**{"transition.decay": 1.0})
        self.assertEqual(context.exception.key, "transition.decay")
        with self.assertRaises(ConfigurationError) as context:
            small_config(policies=["random", "oracle"])
        self.assertEqual(context.exception.key, "policies")
        with self.assertRaises(ConfigurationError) as context:
            small_config(policies=["random", "random"])
        self.assertEqual(context.exception.key, "policies")

    def test_flat_dotted_file(self) -> None:
        path = self.write_file("preset: fig5b\nmodel.n_tx: 16\nn_trials: 7\ntransition.decay: 0.9\n")
        config = resolve_config(config_path=path)
        self.assertEqual(config.model.n_tx, 16)
        self.assertEqual(config.model.n_rx, 4)
        self.assertEqual(config.transition.decay, 0.9)
        self.assertEqual(config.n_trials, 7)

    def test_precedence(self) -> None:
        """Flags override the file, which overrides the preset"""

        path = self.write_file("n_trials: 7\nseed: 3\nmodel:\n  n_rx: 8\n")
        config = resolve_config(preset="fig5b", config_path=path, overrides={"n_trials": 9, "depth": None},
                                sets=["seed=11", "transition.mix=0.25"])
        self.assertEqual(config.n_trials, 9)
        self.assertEqual(config.seed, 11)
        self.assertEqual(config.model.n_rx, 8)
        self.assertEqual(config.transition.mix, 0.25)
        self.assertEqual(config.depth, 2)

    def test_missing_file(self) -> None:
        path = os.path.join(self.tmp.name, "missing.yaml")
        with self.assertRaises(ConfigurationError) as context:
            resolve_config(config_path=path)
        self.assertIn(path, str(context.exception))
        with self.assertRaises(ConfigurationError):
            resolve_config()

    def test_unflatten(self) -> None:
        self.assertEqual(unflatten({"model.n_tx": 8, "model": {"n_rx": 4}, "seed": 1}),
                         {"model": {"n_tx": 8, "n_rx": 4}, "seed": 1})
        with self.assertRaises(ConfigurationError):
            unflatten({"model": 3, "model.n_tx": 8})

    def test_parse_override(self) -> None:
        self.assertEqual(parse_override("transition.decay=0.9"), ("transition.decay", 0.9))
        self.assertEqual(parse_override("policies=[random, heuristic]"), ("policies", ["random", "heuristic"]))
        with self.assertRaises(ConfigurationError):
            parse_override("decay")

    def test_derived_objects(self) -> None:
        config = small_config(policies="random, lookahead", depth=3, reward="mrc-log", **{"sensing.perfect": True})
        self.assertEqual(config.policies, ("random", "lookahead"))
        self.assertEqual([s.label for s in config.policy_specs()], ["random", "lookahead(3)"])
        self.assertIs(config.observation_mode, ObservationMode.ANALYTIC)
        self.assertTrue(config.detector().is_perfect)
        spec = config.reward_spec()
        self.assertIs(spec.kind, RewardKind.MRC_LOG)
        self.assertAlmostEqual(spec.snr_per_path, 32.0)
        assert_allclose(config.transition_matrix().entries.sum(axis=1), np.ones(8))


class TestEpisode(unittest.TestCase):

    def test_seeds_are_counter_based(self) -> None:
        a, b = TrialSeeds(7, 3), TrialSeeds(7, 3)
        self.assertEqual(a.channel().random(), b.channel().random())
        self.assertNotEqual(a.channel().random(), TrialSeeds(7, 4).channel().random())
        self.assertNotEqual(a.sensing(0).random(), a.sensing(1).random())
        self.assertNotEqual(a.channel().random(), a.policy().random())

    def test_perfect_tracking_with_frozen_paths(self) -> None:
        """With frozen paths and an ideal sensor the greedy policy collects every occupied bin"""

        config = small_config(slots=5, policies=["greedy-reduced"],
                              **{"transition.bandwidth": 0, "sensing.perfect": True})
        experiment = Experiment(config)
        for trial in range(10):
            trace = experiment.run_episode(experiment.policies[0], trial)
            for record in trace.records:
                self.assertEqual(record.state.columns, trace.initial.columns)
                self.assertTrue(set(record.state.columns) <= set(record.action.indices))
                self.assertEqual(record.reward, float(bin_counts(record.state.columns, record.state.rows, 8).sum()))

    def test_ideal_sensor_from_uniform_start(self) -> None:
        """The marginal filter never meets an impossible observation when the sensor is ideal"""

        for name in ("fig5a", "fig6"):
            config = preset_experiments(name).with_overrides(**{"policies": ["greedy-reduced"], "init_mode": "uniform",
                                                                "sensing.perfect": True, "n_trials": 300})
            experiment = Experiment(config)
            for trial in range(config.n_trials):
                rewards = experiment.run_trial(trial)
                self.assertEqual(rewards.shape, (1, config.slots))

    def test_trace_consistency(self) -> None:
        config = small_config(slots=8)
        experiment = Experiment(config)
        for policy in experiment.policies:
            trace = experiment.run_episode(policy, trial=2)
            self.assertEqual(len(trace), 8)
            for record in trace.records:
                self.assertEqual(record.action.size, 4)
                self.assertEqual(record.reward, float(np.dot(record.sensed_bins, record.observation.flags)))
                assert_array_equal(record.sensed_bins, bin_counts(record.state.columns, record.state.rows, 8)[list(record.action.indices)])
            self.assertAlmostEqual(trace.accumulated_reward, float(trace.rewards.sum()))

    def test_common_random_numbers(self) -> None:
        """Every policy of a trial faces the same channel trajectory"""

        experiment = Experiment(small_config())
        traces = [experiment.run_episode(p, trial=5) for p in experiment.policies]
        for trace in traces[1:]:
            self.assertEqual(trace.initial.columns, traces[0].initial.columns)
            self.assertEqual([r.state.columns for r in trace.records], [r.state.columns for r in traces[0].records])

    def test_episode_is_reproducible(self) -> None:
        config = small_config()
        experiment = Experiment(config)
        first = run_episode(config, experiment.policies[2], trial=4)
        second = experiment.run_episode(experiment.policies[2], trial=4)
        self.assertEqual([r.action for r in first.records], [r.action for r in second.records])
        assert_array_equal(first.rewards, second.rewards)

    def test_trial_rewards(self) -> None:
        experiment = Experiment(small_config(slots=6))
        rewards = experiment.run_trial(0)
        self.assertEqual(rewards.shape, (3, 6))
        assert_array_equal(rewards[1], experiment.run_episode(experiment.policies[1], 0).rewards)


class TestAggregation(unittest.TestCase):

    def test_ci95_half_width(self) -> None:
        samples = np.array([1.0, 2.0, 3.0, 4.0])
        self.assertAlmostEqual(float(ci95_half_width(samples)), 1.96 * np.std(samples, ddof=1) / 2.0)
        assert_array_equal(ci95_half_width(np.ones((1, 2, 3))), np.zeros((2, 3)))

    def test_from_rewards(self) -> None:
        rewards = np.array([[[1.0, 0.0, 2.0]], [[1.0, 2.0, 0.0]]])
        result = AggregateResult.from_rewards("toy", ("random",), rewards)
        assert_allclose(result.mean_reward, [[1.0, 1.0, 1.0]])
        assert_allclose(result.acc_reward, [[1.0, 2.0, 3.0]])
        assert_allclose(result.ci95[0, 0], 0.0)
        self.assertEqual(result.slots, 3)
        self.assertEqual(result.slot_average("random", first_slot=1), 1.0)

        frame = result.to_frame()
        self.assertEqual(list(frame.columns), list(RESULT_COLUMNS))
        self.assertEqual(list(frame["slot"]), [1, 2, 3])
        self.assertEqual(set(frame["preset"]), {"toy"})
        self.assertEqual(set(frame["n_trials"]), {2})

    def test_rerun_is_bitwise_identical(self) -> None:
        config = small_config(n_trials=10)
        first = monte_carlo(config)
        second = monte_carlo(config)
        assert_array_equal(first.mean_reward, second.mean_reward)
        assert_array_equal(first.ci95, second.ci95)
        self.assertEqual(first.policies, ("greedy-full", "greedy-reduced", "random"))

    def test_workers_do_not_change_results(self) -> None:
        config = small_config(n_trials=12)
        inline = TrialRunner(config, n_workers=1, show_progress=False).run()
        parallel = TrialRunner(config, n_workers=2, show_progress=False).run()
        assert_array_equal(inline, parallel)
        assert_array_equal(TrialRunner(config, show_progress=False).run(trials=[7, 3]), inline[[7, 3]])

    def test_random_baseline(self) -> None:
        """Uniform dynamics: `L·M_p/N_t` paths per slot, minus the rare shared bins"""

        config = small_config(n_trials=4000, policies=["random"], **{"transition.mix": 1.0, "sensing.perfect": True})
        result = monte_carlo(config)
        mean = float(result.mean_reward[0].mean())
        self.assertAlmostEqual(mean, 1.0, delta=0.03)
        self.assertAlmostEqual(mean, 0.5 * (2.0 - 1.0 / 32.0), delta=0.015)

    def test_interval_shrinks_with_trials(self) -> None:
        """Four times the trials halve the confidence interval"""

        config = small_config(policies=["random"], **{"transition.mix": 1.0, "sensing.perfect": True})
        small = monte_carlo(config.with_overrides(n_trials=500))
        large = monte_carlo(config.with_overrides(n_trials=2000))
        ratio = float(small.acc_ci95[0, -1] / large.acc_ci95[0, -1])
        self.assertAlmostEqual(ratio, 2.0, delta=0.3)

    def test_policy_ordering(self) -> None:
        result = monte_carlo(small_config(n_trials=1000), n_workers=2)
        greedy, reduced, random = (result.slot_average(p) for p in ("greedy-full", "greedy-reduced", "random"))
        self.assertGreaterEqual(greedy, random + 0.2)
        self.assertGreaterEqual(reduced, random + 0.2)
        self.assertLessEqual(abs(greedy - reduced), 0.1)


def paired_gap(rewards: np.ndarray, better: int, worse: int, first_slot: int = 0):
    """Mean and 95% half-width of the per-trial difference of slot-averaged rewards."""
    gaps = rewards[:, better, first_slot:].mean(axis=1) - rewards[:, worse, first_slot:].mean(axis=1)
    return float(gaps.mean()), float(ci95_half_width(gaps))


@unittest.skipUnless(SLOW_TESTS, "set PILOT_BEAM_SLOW_TESTS=1 to run the full-size comparisons")
class TestFullSizeComparisons(unittest.TestCase):

    def setUp(self) -> None:
        self.workers = os.cpu_count() or 1

    def run_rewards(self, preset: str, **overrides):
        config = preset_experiments(preset)
        if overrides:
            config = config.with_overrides(**overrides)
        return TrialRunner(config, n_workers=self.workers, show_progress=False).run(), config

    def test_small_channel_ordering(self) -> None:
        rewards, config = self.run_rewards("fig5b")
        labels = [s.label for s in config.policy_specs()]
        lookahead, greedy, reduced, random = (labels.index(p) for p in ("lookahead(2)", "greedy-full", "greedy-reduced", "random"))
        gap, ci = paired_gap(rewards, lookahead, greedy)
        self.assertGreaterEqual(gap, -ci)
        gap, _ = paired_gap(rewards, greedy, random)
        self.assertGreaterEqual(gap, 0.2)
        gap, _ = paired_gap(rewards, greedy, reduced)
        self.assertLessEqual(abs(gap), 0.05)

    def test_faster_paths_are_harder_to_track(self) -> None:
        policies = ["greedy-full"]
        slow_rewards, _ = self.run_rewards("fig5b", policies=policies)
        fast_rewards, _ = self.run_rewards("fig5b-09", policies=policies)
        slow = slow_rewards[:, 0, 1:].mean(axis=1)
        fast = fast_rewards[:, 0, 1:].mean(axis=1)
        self.assertLess(fast.mean() + ci95_half_width(fast), slow.mean() - ci95_half_width(slow))

    def test_greedy_beats_heuristic(self) -> None:
        result = monte_carlo(preset_experiments("fig6"), n_workers=self.workers)
        heuristic = result.index_of("heuristic")
        upper = result.acc_reward[heuristic, -1] + result.acc_ci95[heuristic, -1]
        for policy in ("greedy-full", "greedy-reduced"):
            p = result.index_of(policy)
            self.assertGreater(result.acc_reward[p, -1] - result.acc_ci95[p, -1], upper)

    def test_large_channel(self) -> None:
        result = monte_carlo(preset_experiments("fig7"), n_workers=self.workers)
        self.assertGreater(result.acc_reward[result.index_of("greedy-reduced"), -1],
                           result.acc_reward[result.index_of("heuristic"), -1])

    def test_greedy_cost_does_not_grow_with_beams(self) -> None:
        transition = build_banded_transition(64, 8, 0.5)
        belief = ReducedBelief(np.random.default_rng(0).dirichlet(np.ones(64), size=2))
        timings = {}
        for m_p in (2, 32):
            start = time.perf_counter()
            for _ in range(200):
                greedy_action(belief, transition, m_p)
            timings[m_p] = time.perf_counter() - start
        self.assertLess(timings[32], 10 * timings[2])


if __name__ == "__main__":
    unittest.main()
