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

import copy
import logging

from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple

import yaml

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from pilot_beam_tool.channel.model import ModelParams
from pilot_beam_tool.channel.transition import TransitionMatrix, transition_from_config
from pilot_beam_tool.errors import ConfigurationError, ParameterError
from pilot_beam_tool.policies.base import PolicySpec
from pilot_beam_tool.pomdp.reward import RewardKind, RewardSpec
from pilot_beam_tool.sensing.detector import DetectorSpec, ObservationMode, make_detector


logger = logging.getLogger(__name__)


# The YAML file where the bundled presets are stored
PRESETS_PATH = Path(__file__).resolve().parent.parent / "resources" / "presets.yaml"



class InitMode(str, Enum):
    UNIFORM = "uniform" # Nothing is disclosed, beliefs start uniform
    KNOWN = "known"     # The initial columns are disclosed to every policy



class ModelSection(BaseModel):
    """The `model` section: antennas, paths and powers."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    n_tx: int = Field(ge=2)
    n_rx: int = Field(ge=1)
    n_paths: int = Field(ge=1)
    gain_var: float = Field(default=1.0, gt=0.0)
    noise_var: float = Field(default=1.0, gt=0.0)
    tx_power: float = Field(default=1.0, gt=0.0)
    path_snr_db: Optional[float] = None # When set, `tx_power` is derived from it


    def to_params(self) -> ModelParams:
        params = ModelParams(n_tx=self.n_tx, n_rx=self.n_rx, n_paths=self.n_paths,
                             gain_var=self.gain_var, noise_var=self.noise_var, tx_power=self.tx_power)
        if self.path_snr_db is not None:
            params = params.with_path_snr(ModelParams.db_to_linear(self.path_snr_db))
        return params



class TransitionSection(BaseModel):
    """The `transition` section: band half-width `B`, decay `β` and uniform mixing `λ`."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    bandwidth: int = Field(ge=0)
    decay: float = Field(ge=0.0, lt=1.0)
    mix: float = Field(default=0.0, ge=0.0, le=1.0)



class SensingSection(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    p_fa: float = Field(default=0.05, gt=0.0, lt=1.0)
    perfect: bool = False # Ideal sensor, flags sampled from the bin occupancy (analytic mode only)



class ExperimentConfig(BaseModel):
    """
    A complete experiment: the channel, the sensor, the episode protocol and the policies to compare.

    `slot_length` (`M_s`) is recorded for reference only, since rewards are counted per slot.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str = "custom"
    model: ModelSection
    transition: TransitionSection
    sensing: SensingSection = SensingSection()
    m_p: int = Field(ge=1)
    slots: int = Field(ge=1)
    slot_length: int = Field(default=10, ge=1)
    init_mode: InitMode = InitMode.KNOWN
    policies: Tuple[str, ...] = Field(min_length=1)
    depth: int = Field(default=2, ge=1) # Depth of a bare `lookahead`
    n_trials: int = Field(ge=1)
    seed: int = Field(default=0, ge=0)
    obs_mode: ObservationMode = ObservationMode.SIGNAL
    reward: RewardKind = RewardKind.PATH_COUNT
    n_workers: int = Field(default=1, ge=1)


    @field_validator("policies", mode="before")
    @classmethod
    def _split_policies(cls, value: Any) -> Any:
        # `--set policies=random,heuristic` arrives as a single string
        if isinstance(value, str):
            return tuple(p.strip() for p in value.split(",") if p.strip())
        return value


    @model_validator(mode="after")
    def _check_consistency(self) -> "ExperimentConfig":
        if self.m_p > self.model.n_tx:
            raise ConfigurationError(f"The number of pilot beams ({self.m_p}) exceeds the number of columns ({self.model.n_tx}).", key="m_p")
        if self.m_p > self.slot_length:
            raise ConfigurationError(f"A slot of {self.slot_length} symbols cannot hold {self.m_p} pilot symbols.", key="slot_length")
        if self.transition.bandwidth >= self.model.n_tx:
            raise ConfigurationError(f"The bandwidth must be smaller than n_tx={self.model.n_tx}.", key="transition.bandwidth")
        labels = [s.label for s in self.policy_specs()]
        if len(set(labels)) != len(labels):
            raise ConfigurationError(f"Duplicated policies in {labels}.", key="policies")
        return self


    def policy_specs(self) -> Tuple[PolicySpec, ...]:
        return tuple(PolicySpec.parse(p, default_depth=self.depth) for p in self.policies)


    def model_params(self) -> ModelParams:
        return self.model.to_params()


    def transition_matrix(self) -> TransitionMatrix:
        return transition_from_config(self.model.n_tx, self.transition.bandwidth, self.transition.decay, self.transition.mix)


    def detector(self) -> DetectorSpec:
        params = self.model_params()
        if self.sensing.perfect:
            return DetectorSpec.perfect(params)
        return make_detector(self.sensing.p_fa, params)


    @property
    def observation_mode(self) -> ObservationMode:
        """The observation mode actually simulated; the ideal sensor always runs in analytic mode."""
        return ObservationMode.ANALYTIC if self.sensing.perfect else self.obs_mode


    def reward_spec(self) -> RewardSpec:
        # Per-path SNR of the combining reward, transmit power excluded
        model = self.model
        return RewardSpec(kind=self.reward, snr_per_path=model.n_tx * model.n_rx * model.gain_var / model.noise_var)


    def with_overrides(self, **changes: Any) -> "ExperimentConfig":
        """A validated copy with some dotted keys changed, e.g., `with_overrides(**{"model.n_tx": 16})`."""
        tree = self.model_dump(mode="json")
        for key, value in changes.items():
            tree = deep_merge(tree, unflatten({key: value}))
        return validate_config(tree)



def validate_config(tree: Mapping[str, Any]) -> ExperimentConfig:
    """
    Validate a nested configuration tree.

    Raises:
        ConfigurationError: Naming the first offending dotted key.
    """

    try:
        return ExperimentConfig.model_validate(dict(tree))
    except ValidationError as e:
        error = e.errors()[0]
        key = ".".join(str(part) for part in error["loc"]) or None
        raise ConfigurationError(f"{error['msg']} (got {error.get('input')!r}).", key=key) from e
    except ParameterError as e:
        raise ConfigurationError(str(e)) from e


def unflatten(mapping: Mapping[str, Any]) -> Dict[str, Any]:
    """Turn flat dotted keys (`model.n_tx: 8`) into a nested tree; nested values are unflattened too."""
    tree: Dict[str, Any] = {}
    for key, value in mapping.items():
        if isinstance(value, Mapping):
            value = unflatten(value)
        parts = str(key).split(".")
        node = tree
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigurationError("A scalar value and a section share the same key.", key=".".join(parts[:-1]))
            node = child
        leaf = parts[-1]
        if isinstance(value, dict) and isinstance(node.get(leaf), dict):
            node[leaf] = deep_merge(node[leaf], value)
        else:
            node[leaf] = value
    return tree


def deep_merge(base: Mapping[str, Any], override: Mapping[str, Any]) -> Dict[str, Any]:
    """Recursively merge `override` into a copy of `base`; leaves of `override` win."""
    merged = copy.deepcopy(dict(base))
    for key, value in override.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), Mapping):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def parse_override(text: str) -> Tuple[str, Any]:
    """Parse a `key=value` override; the value is read as YAML (`0.5` is a float, `[a, b]` a list)."""
    key, sep, raw = text.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigurationError(f"Overrides must be written `key=value`, got `{text}`.")
    try:
        value = yaml.safe_load(raw) if raw.strip() else None
    except yaml.YAMLError as e:
        raise ConfigurationError(f"Cannot parse the value `{raw}`: {e}", key=key) from e
    return key, value


@lru_cache(maxsize=1)
def _preset_trees() -> Dict[str, Dict[str, Any]]:
    with PRESETS_PATH.open("r", encoding="utf-8") as f:
        data = yaml.safe_load(f)
    if not isinstance(data, dict):
        raise ConfigurationError(f"The YAML root element of `{PRESETS_PATH}` must be a mapping.")
    return {str(name): unflatten(tree) for name, tree in data.items()}


def preset_names() -> Tuple[str, ...]:
    return tuple(_preset_trees())


def preset_tree(name: str) -> Dict[str, Any]:
    trees = _preset_trees()
    if name not in trees:
        raise ConfigurationError(f"Unknown preset `{name}` (available: {', '.join(trees)}).", key="preset")
    return copy.deepcopy(trees[name])


def preset_experiments(name: str) -> ExperimentConfig:
    """The bundled experiment `name`, e.g., `fig5b`."""
    return validate_config(preset_tree(name))


def load_config_file(path: str) -> Dict[str, Any]:
    """Read a YAML configuration file into a nested tree (flat dotted keys are accepted)."""
    file_path = Path(path)
    if not file_path.is_file():
        raise ConfigurationError(f"Configuration file not found: `{file_path}`.")
    try:
        with file_path.open("r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigurationError(f"Cannot parse `{file_path}`: {e}") from e
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"The YAML root element of `{file_path}` must be a mapping.")
    return unflatten(data)


def resolve_config(preset: Optional[str] = None, config_path: Optional[str] = None,
                   overrides: Optional[Mapping[str, Any]] = None, sets: Sequence[str] = ()) -> ExperimentConfig:
    """
    Build the experiment configuration with precedence flags > file > preset.

    Args:
        preset (Optional[str]): The base preset given on the command line; it replaces the `preset` key of the file.
        config_path (Optional[str]): A YAML configuration file.
        overrides (Optional[Mapping[str, Any]]): Dotted-key values from dedicated flags (e.g., `n_trials`).
        sets (Sequence[str]): Generic `key=value` overrides.

    Raises:
        ConfigurationError: If neither a preset nor a file is given, or the result is invalid.
    """

    file_tree = load_config_file(config_path) if config_path is not None else {}
    base_name = preset if preset is not None else file_tree.pop("preset", None)
    file_tree.pop("preset", None)
    if base_name is None and config_path is None:
        raise ConfigurationError("Either a preset or a configuration file is required.", key="preset")

    tree = preset_tree(str(base_name)) if base_name is not None else {}
    if base_name is not None:
        logger.debug(f"Using preset `{base_name}` as base configuration.")
    tree = deep_merge(tree, file_tree)
    tree = deep_merge(tree, unflatten({k: v for k, v in (overrides or {}).items() if v is not None}))
    tree = deep_merge(tree, unflatten(dict(parse_override(s) for s in sets)))
    return validate_config(tree)
