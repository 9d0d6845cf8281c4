# This file is part of ts_lcmkit.
#
# Developed for the Vera Rubin Observatory Systems.
# This product includes software developed by the LSST Project
# (https://www.lsst.org).
# See the COPYRIGHT file at the top-level directory of this distribution
# for details of code ownership.
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

__all__ = ["LOG_SQRT_2PI", "gaussian_logpdf", "standard_normal_logpdf"]

import math

import numpy as np

from ..errors import DomainError
from .tensor import ArrayLike, Tensor, as_tensor, log

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def gaussian_logpdf(x: ArrayLike, mean: ArrayLike, std: ArrayLike) -> Tensor:
    """Elementwise log-density of the Gaussian distribution.

    Parameters
    ----------
    x : `Tensor`
        Values.
    mean : `Tensor`
        Means.
    std : `Tensor`
        Standard deviations, broadcastable to x.

    Returns
    -------
    `Tensor`
        log N(x; mean, std^2).

    Raises
    ------
    `DomainError`
        If any standard deviation is not positive.
    """

    std = as_tensor(std)
    if np.any(~(std.data > 0.0)):
        raise DomainError("Standard deviation should be positive.")

    normalized = (as_tensor(x) - mean) / std
    return -LOG_SQRT_2PI - log(std) - 0.5 * normalized * normalized


def standard_normal_logpdf(x: ArrayLike) -> Tensor:
    """Elementwise log-density of the standard Gaussian distribution."""
    x = as_tensor(x)
    return -LOG_SQRT_2PI - 0.5 * x * x
