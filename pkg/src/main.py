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


import sys

from pilot_beam_tool.cli import cli


########################################################################
#### Default Command
#### (Used when the script is launched without arguments).

## A short run of the known-initial-state comparison on the small array
DEFAULT_ARGS = ["run", "--preset", "fig5b", "--trials", "1000", "--seed", "7"]

########################################################################


def main():
    """
    Entry point of the application.

    Forwards the command line to the `pilot_beam_tool` commands, or runs `DEFAULT_ARGS` when none is given.
    """

    args = sys.argv[1:] or DEFAULT_ARGS
    cli.main(args=args, prog_name="pilot_beam_tool")


if __name__ == "__main__":
    main()
