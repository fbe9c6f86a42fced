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

import math

import numpy as np

from pilot_beam_tool.channel.model import VirtualChannelMatrix
from pilot_beam_tool.errors import ParameterError


# Antenna spacing over wavelength of the uniform linear arrays
DEFAULT_D_OVER_LAMBDA = 0.5


def physical_angle_to_direction(angle: float, d_over_lambda: float = DEFAULT_D_OVER_LAMBDA) -> float:
    """Map a physical angle `φ` in `[-π/2, π/2]` (radians) to the normalized direction `θ = (d/λ) sin(φ)`."""
    if not -math.pi / 2 <= angle <= math.pi / 2:
        raise ParameterError(f"The physical angle must be in [-pi/2, pi/2], got {angle}.")
    return d_over_lambda * math.sin(angle)


def steering_vector(direction: float, n: int) -> np.ndarray:
    """
    The unit-norm response of an `n`-element ULA towards the normalized direction `θ`.

    Returns:
        np.ndarray: `(1/sqrt(n)) [1, e^{-j2πθ}, ..., e^{-j(n-1)2πθ}]`.
    """

    if n < 1:
        raise ParameterError(f"The number of antennas must be at least 1, got {n}.")
    return np.exp(-2j * np.pi * direction * np.arange(n)) / math.sqrt(n)


def grid_directions(n: int) -> np.ndarray:
    """The uniform virtual-angle grid `θ̃_j = -1/2 + j/n`, `j = 0..n-1`."""
    return -0.5 + np.arange(n) / n


def steering_grid(n: int) -> np.ndarray:
    """The `n x n` unitary matrix whose columns are the steering vectors of the virtual-angle grid."""
    return np.stack([steering_vector(theta, n) for theta in grid_directions(n)], axis=1)


def virtual_to_physical(vcm: VirtualChannelMatrix) -> np.ndarray:
    """The antenna-domain channel `H = A_R H̃ A_T^H`."""
    n_rx, n_tx = vcm.entries.shape
    return steering_grid(n_rx) @ vcm.entries @ steering_grid(n_tx).conj().T


def physical_to_virtual(channel: np.ndarray) -> VirtualChannelMatrix:
    """The angle-domain channel `H̃ = A_R^H H A_T`."""
    n_rx, n_tx = channel.shape
    return VirtualChannelMatrix(entries=steering_grid(n_rx).conj().T @ channel @ steering_grid(n_tx))
