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

import abc
import re

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

from typing_extensions import Self

import numpy as np

from pilot_beam_tool.errors import ConfigurationError
from pilot_beam_tool.pomdp.belief import FullBelief
from pilot_beam_tool.reduced.belief import ReducedBelief
from pilot_beam_tool.sensing.observation import Action, Observation


@dataclass(frozen=True)
class KindData:
    """The data structure defining an element of the `PolicyKind` enumerator."""

    name: str          # The name used in configurations and CSV files
    uses_belief: bool  # Whether the policy keeps a posterior over the path columns
    needs_depth: bool = False # Whether the policy is parametrized by a lookahead depth


# The enumerator of the available pilot beam policies
class PolicyKind(Enum):
    """The pilot beam selection policies that `make_policy` can build."""

    RANDOM = KindData("random", uses_belief=False)
    HEURISTIC = KindData("heuristic", uses_belief=False)
    GREEDY_FULL = KindData("greedy-full", uses_belief=True)
    GREEDY_REDUCED = KindData("greedy-reduced", uses_belief=True)
    LOOKAHEAD = KindData("lookahead", uses_belief=True, needs_depth=True)

    @staticmethod
    def kind_from_string(kind_str: str) -> Self:
        """Map a name to a `PolicyKind`, raising a `ConfigurationError` if it matches none."""
        for kind in PolicyKind:
            if kind_str == kind.value.name:
                return kind
        names = ", ".join(k.value.name for k in PolicyKind)
        raise ConfigurationError(f"Unknown policy kind `{kind_str}` (expected one of: {names}).", key="policies")



@dataclass(frozen=True)
class PolicySpec:
    """A policy kind with its parameters, written `kind` or `lookahead(d)` in configurations."""

    kind: PolicyKind
    depth: int = 1 # Lookahead depth, only meaningful for `PolicyKind.LOOKAHEAD`

    # `lookahead` with an optional `(d)` depth
    LOOKAHEAD_PATTERN = re.compile(r"^lookahead\s*(?:\(\s*(-?\d+)\s*\))?$")


    @property
    def label(self) -> str:
        """The name of the policy in results, e.g., `lookahead(2)`."""
        if self.kind.value.needs_depth:
            return f"{self.kind.value.name}({self.depth})"
        return self.kind.value.name


    @staticmethod
    def parse(text: str, default_depth: int = 2) -> "PolicySpec":
        """
        Parse a policy string.

        Args:
            text (str): e.g. `random`, `greedy-reduced`, `lookahead(2)`.
            default_depth (int): The depth of a bare `lookahead`.

        Raises:
            ConfigurationError: If the string is not a valid policy.
        """

        text = str(text).strip().lower()
        match = PolicySpec.LOOKAHEAD_PATTERN.match(text)
        if match is None:
            return PolicySpec(kind=PolicyKind.kind_from_string(text))
        depth = int(match.group(1)) if match.group(1) is not None else default_depth
        if depth < 1:
            raise ConfigurationError(f"The lookahead depth must be at least 1, got {depth}.", key="policies")
        return PolicySpec(kind=PolicyKind.LOOKAHEAD, depth=depth)


    def __str__(self) -> str:
        return self.label



# What a policy is told about the first slot
@dataclass(frozen=True)
class InitialKnowledge:
    """The initial information disclosed to a policy: the true starting columns (known mode) or nothing (uniform mode)."""

    columns: Optional[Tuple[int, ...]] = None

    @property
    def is_known(self) -> bool:
        return self.columns is not None



class PolicyState:
    """Base class of the per-episode internal state of a policy (a value, replaced by `observe`)."""


@dataclass(frozen=True)
class NoState(PolicyState):
    """The random policy keeps no state."""


@dataclass(frozen=True)
class FullBeliefState(PolicyState):
    belief: FullBelief


@dataclass(frozen=True)
class ReducedBeliefState(PolicyState):
    belief: ReducedBelief


@dataclass(frozen=True)
class TrackerState(PolicyState):
    """The heuristic trackers: the column each tracker is locked on and its beams, in ranking order."""

    centers: Tuple[int, ...]
    beams: Tuple[Tuple[int, ...], ...] = field(default_factory=tuple)



class Policy(abc.ABC):
    """
    The common interface of pilot beam policies.

    A policy object is immutable and shared by all the episodes it plays; the per-episode data lives
    in the `PolicyState` returned by `initial_state` and replaced at every `observe`.
    """

    def __init__(self, spec: PolicySpec):
        self.spec = spec


    @property
    def label(self) -> str:
        return self.spec.label


    @abc.abstractmethod
    def initial_state(self, knowledge: InitialKnowledge) -> PolicyState:
        raise NotImplementedError


    @abc.abstractmethod
    def choose(self, state: PolicyState, slot: int, rng: np.random.Generator) -> Action:
        """Select the action of slot `slot` (0-based)."""
        raise NotImplementedError


    @abc.abstractmethod
    def observe(self, state: PolicyState, action: Action, observation: Observation) -> PolicyState:
        """Return the state after the feedback `observation` of `action`."""
        raise NotImplementedError


    def __str__(self) -> str:
        return f"{type(self).__name__}({self.label})"
