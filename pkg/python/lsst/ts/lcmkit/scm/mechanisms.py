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

__all__ = [
    "Mechanism",
    "LinearAdditiveMechanism",
    "AffineConditionalMechanism",
    "Toy2DMechanism",
    "MonotoneMechanism",
    "check_mechanism_monotone",
]

import abc
import typing

import numpy as np
from scipy.optimize import brentq

from ..constants import (
    INVERSE_TOLERANCE,
    LOG_SCALE_MAXIMUM,
    LOG_SCALE_MINIMUM,
    MONOTONE_GRID_LIMIT,
    MONOTONE_GRID_POINTS,
    MONOTONE_PARENT_CONFIGS,
)
from ..diffnum import Mlp
from ..enums import MechanismKind
from ..errors import DimensionError, NumericalError


class Mechanism(abc.ABC):
    """Causal mechanism z_i = f_i(noise_i; z_pa_i).

    For every fixed value of the parents, the map from the noise to the
    variable is strictly monotone.

    Parameters
    ----------
    n_parents : `int`
        Number of parents the mechanism reads, in the order of
        `Dag.parents`.
    """

    kind: MechanismKind

    def __init__(self, n_parents: int) -> None:
        self.n_parents = n_parents

    def _check(self, values: np.ndarray, parents: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        values = np.asarray(values, dtype=np.float64).reshape(-1)
        parents = np.asarray(parents, dtype=np.float64)

        expected = (len(values), self.n_parents)
        if parents.shape != expected:
            if parents.size != len(values) * self.n_parents:
                raise DimensionError(f"Parents should have the shape {expected}, got {parents.shape}.")
            parents = parents.reshape(expected)

        return values, parents

    def forward(self, noise: np.ndarray, parents: np.ndarray) -> np.ndarray:
        """Evaluate the mechanism.

        Parameters
        ----------
        noise : `numpy.ndarray`
            Noise values with the shape (N,).
        parents : `numpy.ndarray`
            Parent values with the shape (N, n_parents).

        Returns
        -------
        `numpy.ndarray`
            Variable values with the shape (N,).
        """
        noise, parents = self._check(noise, parents)
        return self._forward(noise, parents)

    def inverse(self, values: np.ndarray, parents: np.ndarray) -> np.ndarray:
        """Invert the mechanism for the noise.

        Parameters
        ----------
        values : `numpy.ndarray`
            Variable values with the shape (N,).
        parents : `numpy.ndarray`
            Parent values with the shape (N, n_parents).

        Returns
        -------
        `numpy.ndarray`
            Noise values with the shape (N,).

        Raises
        ------
        `NumericalError`
            If the mechanism can not be inverted at a point.
        """
        values, parents = self._check(values, parents)
        return self._inverse(values, parents)

    @abc.abstractmethod
    def _forward(self, noise: np.ndarray, parents: np.ndarray) -> np.ndarray:
        raise NotImplementedError("Child class should implemented this.")

    @abc.abstractmethod
    def _inverse(self, values: np.ndarray, parents: np.ndarray) -> np.ndarray:
        raise NotImplementedError("Child class should implemented this.")


class LinearAdditiveMechanism(Mechanism):
    """Additive noise with linear effects, z_i = noise_i + sum_j a_j z_j.

    Parameters
    ----------
    coefficients : `numpy.ndarray`
        Coefficients of the parents. Empty for a root.
    """

    kind = MechanismKind.LinearAdditive

    def __init__(self, coefficients: typing.Any = ()) -> None:
        self.coefficients = np.asarray(coefficients, dtype=np.float64).reshape(-1)
        super().__init__(len(self.coefficients))

    def _forward(self, noise: np.ndarray, parents: np.ndarray) -> np.ndarray:
        return noise + parents @ self.coefficients

    def _inverse(self, values: np.ndarray, parents: np.ndarray) -> np.ndarray:
        return values - parents @ self.coefficients


class AffineConditionalMechanism(Mechanism):
    """Affine map of the noise with a parent-dependent slope and offset.

    z_i = exp(log_scale(z_pa)) * noise_i + shift(z_pa), where the log-scale is
    clamped so that the slope is inside [1e-3, 1e3].

    Parameters
    ----------
    scale_net : `Mlp`
        Network of the log-scale with one output.
    shift_net : `Mlp`
        Network of the offset with one output.
    n_parents : `int`
        Number of parents. A root reads a constant zero input of width 1.
    """

    kind = MechanismKind.AffineConditional

    def __init__(self, scale_net: Mlp, shift_net: Mlp, n_parents: int) -> None:
        super().__init__(n_parents)

        width = max(n_parents, 1)
        if scale_net.input_width != width or shift_net.input_width != width:
            raise DimensionError(f"Networks should read {width} inputs.")

        self.scale_net = scale_net
        self.shift_net = shift_net

    def _coefficients(self, parents: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        inputs = parents if self.n_parents > 0 else np.zeros((len(parents), 1))
        log_scale = np.clip(self.scale_net.evaluate(inputs)[:, 0], LOG_SCALE_MINIMUM, LOG_SCALE_MAXIMUM)
        return np.exp(log_scale), self.shift_net.evaluate(inputs)[:, 0]

    def _forward(self, noise: np.ndarray, parents: np.ndarray) -> np.ndarray:
        scale, shift = self._coefficients(parents)
        return scale * noise + shift

    def _inverse(self, values: np.ndarray, parents: np.ndarray) -> np.ndarray:
        scale, shift = self._coefficients(parents)
        return (values - shift) / scale


class Toy2DMechanism(Mechanism):
    """Mechanism z = a * p^2 + b * p + c * noise of a single parent p.

    Parameters
    ----------
    quadratic : `float`, optional
        Quadratic coefficient. (the default is 0.3)
    linear : `float`, optional
        Linear coefficient. (the default is 0.6)
    noise_scale : `float`, optional
        Scale of the noise, should be positive. (the default is 0.8)
    """

    kind = MechanismKind.Fixed2DToy

    def __init__(self, quadratic: float = 0.3, linear: float = 0.6, noise_scale: float = 0.8) -> None:
        super().__init__(1)

        if noise_scale <= 0.0:
            raise ValueError(f"Noise scale should be > 0, got {noise_scale}.")

        self.quadratic = quadratic
        self.linear = linear
        self.noise_scale = noise_scale

    def _mean(self, parents: np.ndarray) -> np.ndarray:
        parent = parents[:, 0]
        return self.quadratic * parent**2 + self.linear * parent

    def _forward(self, noise: np.ndarray, parents: np.ndarray) -> np.ndarray:
        return self._mean(parents) + self.noise_scale * noise

    def _inverse(self, values: np.ndarray, parents: np.ndarray) -> np.ndarray:
        return (values - self._mean(parents)) / self.noise_scale


class MonotoneMechanism(Mechanism):
    """Mechanism given by any function that is strictly increasing in the
    noise. The inverse is found by bracketed root finding.

    Parameters
    ----------
    function : `func`
        Vectorized function f(noise, parents) with noise of the shape (N,)
        and parents of the shape (N, n_parents).
    n_parents : `int`
        Number of parents.
    tolerance : `float`, optional
        Absolute tolerance of the root. (the default is 1e-12)
    """

    kind = MechanismKind.Monotone

    # Initial half width of the bracket and the number of doublings
    BRACKET = 10.0
    MAX_EXPANSIONS = 60

    def __init__(
        self,
        function: typing.Callable[[np.ndarray, np.ndarray], np.ndarray],
        n_parents: int,
        tolerance: float = INVERSE_TOLERANCE,
    ) -> None:
        super().__init__(n_parents)
        self.function = function
        self.tolerance = tolerance

    def _forward(self, noise: np.ndarray, parents: np.ndarray) -> np.ndarray:
        return np.asarray(self.function(noise, parents), dtype=np.float64)

    def _inverse(self, values: np.ndarray, parents: np.ndarray) -> np.ndarray:
        noise = np.empty_like(values)
        for idx, (value, parent) in enumerate(zip(values, parents)):
            row = parent.reshape(1, -1)

            def _residual(candidate: float) -> float:
                return float(self.function(np.array([candidate]), row)[0]) - value

            low, high = -self.BRACKET, self.BRACKET
            for _ in range(self.MAX_EXPANSIONS):
                if _residual(low) <= 0.0 <= _residual(high):
                    break
                low, high = 2.0 * low, 2.0 * high
            else:
                raise NumericalError(f"Can not bracket the inverse of the value {value}.")

            noise[idx] = brentq(_residual, low, high, xtol=self.tolerance)

        return noise


def check_mechanism_monotone(
    mechanism: Mechanism,
    rng: np.random.Generator,
    num_points: int = MONOTONE_GRID_POINTS,
    limit: float = MONOTONE_GRID_LIMIT,
    num_configs: int = MONOTONE_PARENT_CONFIGS,
) -> bool:
    """Check numerically that the mechanism is strictly monotone in the noise.

    Parameters
    ----------
    mechanism : `Mechanism`
        Mechanism.
    rng : `numpy.random.Generator`
        Random number generator of the parent configurations.
    num_points : `int`, optional
        Points of the noise grid. (the default is 101)
    limit : `float`, optional
        Noise grid covers [-limit, limit]. (the default is 5.0)
    num_configs : `int`, optional
        Number of random parent configurations. (the default is 20)

    Returns
    -------
    `bool`
        True if the mechanism is strictly monotone on every configuration.
    """

    grid = np.linspace(-limit, limit, num_points)
    for _ in range(num_configs):
        parents = np.tile(rng.standard_normal(mechanism.n_parents), (num_points, 1))
        steps = np.diff(mechanism.forward(grid, parents))
        if not (np.all(steps > 0.0) or np.all(steps < 0.0)):
            return False

    return True
