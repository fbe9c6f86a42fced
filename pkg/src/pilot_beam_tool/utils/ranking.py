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

from typing import Iterable, List

import numpy as np


# Scores equal up to this many decimals are treated as ties
TIE_DECIMALS = 12


def rank_columns(scores: np.ndarray, exclude: Iterable[int] = ()) -> List[int]:
    """
    Order columns by decreasing score, ties broken by ascending column index.

    Args:
        scores (np.ndarray): One score per column.
        exclude (Iterable[int]): Columns to leave out of the ranking.

    Returns:
        List[int]: The ranked column indices.
    """

    rounded = np.round(np.asarray(scores, dtype=float), TIE_DECIMALS)
    order = np.argsort(-rounded, kind="stable")
    excluded = set(exclude)
    return [int(c) for c in order if int(c) not in excluded]


def top_columns(scores: np.ndarray, count: int) -> List[int]:
    """
    Select the `count` best columns.

    Args:
        scores (np.ndarray): One score per column.
        count (int): The number of columns to keep.

    Returns:
        List[int]: The first `count` columns of `rank_columns`, sorted ascending.
    """

    return sorted(rank_columns(scores)[:count])


def first_best(values: np.ndarray) -> int:
    """The index of the first maximal entry, with the same tie tolerance as `rank_columns`."""
    rounded = np.round(np.asarray(values, dtype=float), TIE_DECIMALS)
    return int(np.argmax(rounded))
