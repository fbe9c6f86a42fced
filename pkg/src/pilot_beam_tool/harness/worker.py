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
import queue as queue_module
import traceback

from multiprocessing import Event, Process, Queue
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from tqdm import tqdm

from pilot_beam_tool.errors import PilotBeamError
from pilot_beam_tool.harness.config import ExperimentConfig, validate_config
from pilot_beam_tool.harness.episode import Experiment


logger = logging.getLogger(__name__)


# Number of trials a worker runs between two progress messages
PROGRESS_EVERY = 50



def run_trial_block(returning_queue: Queue, stop_event: Event, config_tree: Dict[str, Any], trials: List[int]) -> None:
    """
    The function executed by every worker process.

    It rebuilds the experiment from the (picklable) configuration tree, runs its block of
    trials, and reports progress, the outcome or the error through `returning_queue`.
    """

    try:
        experiment = Experiment(validate_config(config_tree))
        rewards = []
        for done, trial in enumerate(trials, start=1):
            if stop_event.is_set():
                TrialRunner.add_cancel(returning_queue)
                return
            rewards.append(experiment.run_trial(trial))
            if done % PROGRESS_EVERY == 0:
                TrialRunner.add_progress(returning_queue, PROGRESS_EVERY)
        TrialRunner.add_progress(returning_queue, len(trials) % PROGRESS_EVERY)
        TrialRunner.add_outcome(returning_queue, (list(trials), np.stack(rewards) if rewards else None))
    except Exception:
        TrialRunner.add_error(returning_queue, traceback.format_exc())



# Run the trials of an experiment in worker processes with a progress bar
class TrialRunner:
    """
    Distribute trial indices over `n_workers` processes and collect the per-slot rewards.

    Each worker receives a contiguous block of trial indices and reports through a queue with
    dictionaries keyed by `result`, `progress`, `error` or `cancel`. The rewards are reassembled
    by trial index, so the result does not depend on the scheduling. With one worker the trials
    run in the calling process.
    """

    # The keys of the dictionaries exchanged through the queue
    ERROR_KEY = "error"
    CANCEL_KEY = "cancel"
    OUTCOME_KEY = "result"
    PROGRESS_KEY = "progress"
    GENERIC_ERROR = "Generic error"
    GENERIC_CANCEL = "Cancelled by the user"

    # Seconds between two checks of the worker liveness while waiting for messages
    POLL_TIMEOUT = 1.0


    def __init__(self, config: ExperimentConfig, n_workers: Optional[int] = None, show_progress: bool = True):
        """
        Args:
            config (ExperimentConfig): The validated experiment.
            n_workers (Optional[int]): Number of processes; `config.n_workers` if None.
            show_progress (bool): Whether to display a tqdm progress bar.
        """

        self.config = config
        self.n_workers = max(1, n_workers if n_workers is not None else config.n_workers)
        self.show_progress = show_progress


    def run(self, trials: Optional[Sequence[int]] = None) -> np.ndarray:
        """
        Run the trials and return their rewards.

        Args:
            trials (Optional[Sequence[int]]): The trial indices; `range(n_trials)` by default.

        Returns:
            np.ndarray: The `n x P x T` rewards, ordered as `trials`.

        Raises:
            PilotBeamError: If a worker fails; the message carries the worker traceback.
        """

        trials = list(range(self.config.n_trials)) if trials is None else list(trials)
        n_workers = min(self.n_workers, len(trials))
        logger.info(f"Running {len(trials)} trials of `{self.config.name}` with {n_workers} worker(s).")
        if n_workers <= 1:
            return self._run_inline(trials)
        return self._run_parallel(trials, n_workers)


    def _run_inline(self, trials: List[int]) -> np.ndarray:
        """Run every trial in the calling process."""
        experiment = Experiment(self.config)
        rewards = []
        for trial in tqdm(trials, desc=self.config.name, unit="trial", disable=not self.show_progress):
            rewards.append(experiment.run_trial(trial))
        return np.stack(rewards)


    def _run_parallel(self, trials: List[int], n_workers: int) -> np.ndarray:
        """
        Split `trials` into contiguous blocks, one per worker process, and collect their messages.

        Any failure or interruption sets the stop event and terminates the remaining workers.

        Args:
            trials (List[int]): The trial indices.
            n_workers (int): The number of processes, at most `len(trials)`.

        Returns:
            np.ndarray: The `n x P x T` rewards, ordered as `trials`.
        """

        # Fail in the parent on invalid policies before spawning anything
        Experiment(self.config)
        returning_queue = Queue()
        stop_event = Event()
        config_tree = self.config.model_dump(mode="json")
        blocks = [list(b) for b in np.array_split(np.asarray(trials), n_workers) if len(b) > 0]
        processes = [Process(target=run_trial_block, args=(returning_queue, stop_event, config_tree, [int(t) for t in b]))
                     for b in blocks]
        for process in processes:
            process.start()

        collected: Dict[int, np.ndarray] = {}
        pending = len(processes)
        try:
            with tqdm(total=len(trials), desc=self.config.name, unit="trial", disable=not self.show_progress) as bar:
                while pending > 0:
                    try:
                        message = returning_queue.get(timeout=TrialRunner.POLL_TIMEOUT)
                    except queue_module.Empty:
                        if not any(p.is_alive() for p in processes) and returning_queue.empty():
                            raise PilotBeamError("A worker process exited without reporting its trials.")
                        continue
                    progress = TrialRunner.get_progress(message)
                    if progress is not None:
                        bar.update(progress)
                        continue
                    error = TrialRunner.get_error(message)
                    if error is not None:
                        logger.error(f"Worker failure:\n{error}")
                        raise PilotBeamError(f"Error while running trials in a worker process:\n{error}")
                    if TrialRunner.get_cancel(message) is not None:
                        raise PilotBeamError(TrialRunner.GENERIC_CANCEL)
                    block_trials, block_rewards = TrialRunner.get_outcome(message)
                    for trial, rewards in zip(block_trials, block_rewards):
                        collected[trial] = rewards
                    pending -= 1
        except BaseException:
            stop_event.set()
            for process in processes:
                if process.is_alive():
                    process.terminate()
            raise
        finally:
            for process in processes:
                process.join()

        return np.stack([collected[t] for t in trials])


    @staticmethod
    def build_error(outcome: Optional[str] = None) -> Dict[str, str]:
        """
        Build the message reporting a worker failure.

        Args:
            outcome (Optional[str]): The error text, usually a traceback. `GENERIC_ERROR` if None.

        Returns:
            Dict[str, str]: The message, keyed by `ERROR_KEY`.
        """

        if outcome is None:
            outcome = TrialRunner.GENERIC_ERROR
        return {TrialRunner.ERROR_KEY: outcome}


    @staticmethod
    def build_cancel(outcome: Optional[str] = None) -> Dict[str, str]:
        """
        Build the message reporting that a worker stopped on request.

        Args:
            outcome (Optional[str]): The reason. `GENERIC_CANCEL` if None.

        Returns:
            Dict[str, str]: The message, keyed by `CANCEL_KEY`.
        """

        if outcome is None:
            outcome = TrialRunner.GENERIC_CANCEL
        return {TrialRunner.CANCEL_KEY: outcome}


    @staticmethod
    def build_outcome(outcome: Any) -> Dict[str, Any]:
        """
        Build the message carrying the result of a block of trials.

        Args:
            outcome (Any): The pair `(trial indices, n x P x T rewards)`.

        Returns:
            Dict[str, Any]: The message, keyed by `OUTCOME_KEY`.
        """

        return {TrialRunner.OUTCOME_KEY: outcome}


    @staticmethod
    def add_error(queue: Queue, outcome: Optional[str] = None) -> None:
        """Put an error message on `queue` (see `build_error`)."""
        queue.put(TrialRunner.build_error(outcome))


    @staticmethod
    def add_cancel(queue: Queue, outcome: Optional[str] = None) -> None:
        """Put a cancellation message on `queue` (see `build_cancel`)."""
        queue.put(TrialRunner.build_cancel(outcome))


    @staticmethod
    def add_outcome(queue: Queue, outcome: Any) -> None:
        """Put a result message on `queue` (see `build_outcome`)."""
        queue.put(TrialRunner.build_outcome(outcome))


    @staticmethod
    def add_progress(queue: Queue, count: int) -> None:
        """
        Report `count` more completed trials.

        Args:
            queue (Queue): The queue read by the parent process.
            count (int): The number of trials completed since the last report. Nothing is sent if zero.
        """

        if count > 0:
            queue.put({TrialRunner.PROGRESS_KEY: count})


    @staticmethod
    def get_error(result: Optional[Dict[str, Any]]) -> Optional[str]:
        """
        Retrieve the error carried by a message.

        Args:
            result (Optional[Dict[str, Any]]): A message read from the queue.

        Returns:
            Optional[str]: The error text, or None if the message is not an error.
        """

        return None if result is None else result.get(TrialRunner.ERROR_KEY)


    @staticmethod
    def get_cancel(result: Optional[Dict[str, Any]]) -> Optional[str]:
        """The cancellation reason carried by a message, or None."""
        return None if result is None else result.get(TrialRunner.CANCEL_KEY)


    @staticmethod
    def get_outcome(result: Optional[Dict[str, Any]]) -> Any:
        """
        Retrieve the result of a block of trials.

        Args:
            result (Optional[Dict[str, Any]]): A message read from the queue.

        Returns:
            Any: The pair `(trial indices, rewards)`, or None if the message carries no result.
        """

        return None if result is None else result.get(TrialRunner.OUTCOME_KEY)


    @staticmethod
    def get_progress(result: Optional[Dict[str, Any]]) -> Optional[int]:
        """The number of trials reported by a progress message, or None."""
        return None if result is None else result.get(TrialRunner.PROGRESS_KEY)
