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

import functools
import logging
import sys

from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import click
import coloredlogs
import pandas as pd

from pilot_beam_tool import __version__
from pilot_beam_tool.errors import ConfigurationError, PilotBeamError
from pilot_beam_tool.harness.config import ExperimentConfig, preset_experiments, preset_names, resolve_config
from pilot_beam_tool.harness.episode import EpisodeTrace, Experiment
from pilot_beam_tool.harness.montecarlo import monte_carlo
from pilot_beam_tool.utils.files import OutputData, RunManifest, write_csv


logger = logging.getLogger(__name__)


LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

# Exit codes
EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2

TRACE_COLUMNS = ["slot", "true_columns", "sensed_columns", "flags", "reward"]



def _handle_errors(command: Callable) -> Callable:
    """Map configuration errors to exit status 2 and every other failure to 1, with a diagnostic on stderr."""

    @functools.wraps(command)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return command(*args, **kwargs)
        except (click.exceptions.Exit, click.ClickException, click.Abort):
            raise
        except ConfigurationError as e:
            logger.error(f"Configuration error: {e}")
            sys.exit(EXIT_CONFIG)
        except PilotBeamError as e:
            logger.error(f"Run failed: {e}")
            sys.exit(EXIT_RUNTIME)
        except Exception as e:
            logger.exception(f"Unexpected failure: {e}")
            sys.exit(EXIT_RUNTIME)

    return wrapper


def _split_list(values: Sequence[str]) -> List[str]:
    """Accept both repeated options and comma-separated values."""
    return [item.strip() for value in values for item in value.split(",") if item.strip()]


def _flag_overrides(trials: Optional[int], seed: Optional[int], policies: Optional[List[str]], depth: Optional[int],
                    workers: Optional[int], obs_mode: Optional[str]) -> Dict[str, Any]:
    return {"n_trials": trials, "seed": seed, "policies": policies, "depth": depth, "n_workers": workers, "obs_mode": obs_mode}


def _format_columns(columns: Sequence[int]) -> str:
    """1-based bin numbers separated by spaces."""
    return " ".join(str(c + 1) for c in columns)


def trace_frame(trace: EpisodeTrace) -> pd.DataFrame:
    """One row per slot: true path columns, sensed columns, flags and reward (slots and columns are 1-based)."""
    rows = [(r.slot + 1, _format_columns(r.state.columns), _format_columns(r.action.indices),
             " ".join(str(f) for f in r.observation.flags), float(r.reward)) for r in trace.records]
    return pd.DataFrame(rows, columns=TRACE_COLUMNS)



# Shared options
def _experiment_options(command: Callable) -> Callable:
    options = [
        click.option("--trials", type=click.IntRange(min=1), default=None, help="Number of Monte Carlo trials."),
        click.option("--seed", type=click.IntRange(min=0), default=None, help="Master seed."),
        click.option("--out", "out_dir", type=click.Path(file_okay=False), default="", help="Output directory (default: $PILOT_BEAM_OUT or ./results)."),
        click.option("--depth", type=click.IntRange(min=1), default=None, help="Depth of a bare `lookahead` policy."),
        click.option("--set", "sets", multiple=True, metavar="KEY=VALUE", help="Override a dotted configuration key (repeatable)."),
        click.option("--workers", type=click.IntRange(min=1), default=None, help="Number of worker processes."),
        click.option("--obs-mode", type=click.Choice(["signal", "analytic"]), default=None, help="How detection flags are simulated."),
    ]
    for option in reversed(options):
        command = option(command)
    return command



@click.group()
@click.version_option(__version__, prog_name="pilot_beam_tool")
@click.option("--verbose", "-v", is_flag=True, help="Log at DEBUG level.")
def cli(verbose: bool) -> None:
    """Pilot beam selection for sparse mmWave MIMO channel tracking: Monte Carlo experiments."""
    coloredlogs.install(level=logging.DEBUG if verbose else logging.INFO, fmt=LOG_FORMAT)



@cli.command("run")
@click.option("--preset", default=None, help="Base preset (see the `presets` command).")
@click.option("--config", "config_path", default=None, help="YAML configuration file.")
@click.option("--policies", multiple=True, help="Policies to run, e.g. `greedy-reduced,lookahead(2)`.")
@_experiment_options
@_handle_errors
def cmd_run(preset: Optional[str], config_path: Optional[str], policies: Tuple[str, ...], trials: Optional[int], seed: Optional[int],
            out_dir: str, depth: Optional[int], sets: Tuple[str, ...], workers: Optional[int], obs_mode: Optional[str]) -> None:
    """Run one experiment and write its per-slot results with a manifest."""

    policy_list = _split_list(policies) or None
    config = resolve_config(preset=preset, config_path=config_path, sets=sets,
                            overrides=_flag_overrides(trials, seed, policy_list, depth, workers, obs_mode))
    result = monte_carlo(config, show_progress=True)

    output = OutputData(output_dir=out_dir, run_name=config.name)
    manifest = RunManifest(command="run", seed=config.seed, configs={config.name: config.model_dump(mode="json")})
    write_csv(result.to_frame(), output.get_results_path(), manifest)
    manifest.write(output.get_manifest_path())



@cli.command("compare")
@click.option("--preset", "presets", multiple=True, required=True, help="Presets to run (repeatable or comma-separated).")
@click.option("--config", "config_path", default=None, help="YAML file applied on top of every preset.")
@click.option("--policies", multiple=True, required=True, help="Policies to compare (repeatable or comma-separated).")
@click.option("--name", default="compare", show_default=True, help="Stem of the output files.")
@_experiment_options
@_handle_errors
def cmd_compare(presets: Tuple[str, ...], config_path: Optional[str], policies: Tuple[str, ...], name: str, trials: Optional[int],
                seed: Optional[int], out_dir: str, depth: Optional[int], sets: Tuple[str, ...], workers: Optional[int],
                obs_mode: Optional[str]) -> None:
    """Run several presets on the same policies and write one long-format table."""

    preset_list = _split_list(presets)
    policy_list = _split_list(policies)
    if not preset_list:
        raise click.UsageError("At least one preset is required.")
    if not policy_list:
        raise click.UsageError("At least one policy is required.")

    configs = [resolve_config(preset=p, config_path=config_path, sets=sets,
                              overrides=_flag_overrides(trials, seed, policy_list, depth, workers, obs_mode)) for p in preset_list]
    frames = [monte_carlo(c, show_progress=True).to_frame(preset=p) for p, c in zip(preset_list, configs)]

    output = OutputData(output_dir=out_dir, run_name=name)
    manifest = RunManifest(command="compare", seed=configs[0].seed, configs={p: c.model_dump(mode="json") for p, c in zip(preset_list, configs)})
    write_csv(pd.concat(frames, ignore_index=True), output.get_results_path(), manifest)
    manifest.write(output.get_manifest_path())



@cli.command("trace")
@click.option("--preset", default=None, help="Base preset, e.g. `fig8`.")
@click.option("--config", "config_path", default=None, help="YAML configuration file.")
@click.option("--policies", multiple=True, help="Policies to trace, one CSV each (`{name}_trace_{policy}.csv`); every policy of the configuration by default. Give a single policy for a single trace.")
@click.option("--trial", type=click.IntRange(min=0), default=0, show_default=True, help="Index of the traced trial.")
@_experiment_options
@_handle_errors
def cmd_trace(preset: Optional[str], config_path: Optional[str], policies: Tuple[str, ...], trial: int, trials: Optional[int],
              seed: Optional[int], out_dir: str, depth: Optional[int], sets: Tuple[str, ...], workers: Optional[int],
              obs_mode: Optional[str]) -> None:
    """
    Write the slot-by-slot trace of one episode.

    Every traced policy gets its own CSV file and all of them run on the same channel realization.
    Pass one policy with `--policies` to trace it alone.
    """

    policy_list = _split_list(policies) or None
    config: ExperimentConfig = resolve_config(preset=preset, config_path=config_path, sets=sets,
                                              overrides=_flag_overrides(trials, seed, policy_list, depth, workers, obs_mode))
    experiment = Experiment(config)

    output = OutputData(output_dir=out_dir, run_name=config.name)
    manifest = RunManifest(command="trace", seed=config.seed, configs={config.name: config.model_dump(mode="json")})
    for policy in experiment.policies:
        trace = experiment.run_episode(policy, trial)
        write_csv(trace_frame(trace), output.get_trace_path(policy.label), manifest)
    manifest.write(output.get_manifest_path())



@cli.command("presets")
def cmd_presets() -> None:
    """List the bundled presets."""
    for name in preset_names():
        config = preset_experiments(name)
        model = config.model
        click.echo(f"{name}: N_t={model.n_tx} N_r={model.n_rx} L={model.n_paths} M_p={config.m_p} "
                   f"B={config.transition.bandwidth} beta={config.transition.decay} P_FA={config.sensing.p_fa} "
                   f"T={config.slots} init={config.init_mode.value} trials={config.n_trials} "
                   f"policies={','.join(config.policies)}")



def main() -> None:
    cli()
