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


class PilotBeamError(Exception):
    """Base class of all the errors raised by `pilot_beam_tool`."""


class ParameterError(PilotBeamError, ValueError):
    """A numeric model parameter is outside its admissible range (e.g., a decay `β` not in `[0,1)`)."""


class ConfigurationError(PilotBeamError):
    """An experiment, preset or policy configuration is malformed or inconsistent.

    The message always names the offending (dotted) configuration key when one exists.
    """

    def __init__(self, message: str, key: str = None):
        self.key = key # The dotted configuration key that caused the error, if any
        super().__init__(message if key is None else f"`{key}`: {message}")


class ImpossibleObservationError(PilotBeamError):
    """A Bayes update was requested for an observation with zero probability under the current belief."""
