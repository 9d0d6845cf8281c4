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

__all__ = ["ConditionalAffineTransform"]

import typing

import numpy as np

from .constants import LOG_SCALE_MAXIMUM, LOG_SCALE_MINIMUM
from .diffnum import Mlp, Tensor, as_tensor, clip, exp
from .errors import DimensionError


class ConditionalAffineTransform:
    """Affine map y = exp(log_scale(c)) * v + shift(c) of a scalar v whose
    slope and offset depend on the conditioning vector c.

    The conditioning vector is multiplied by a constant 0/1 mask before the
    networks read it, so a masked input has no influence on the output.

    Parameters
    ----------
    n_conditions : `int`
        Width of the conditioning vector. If 0, the networks read a constant
        zero input of width 1.
    hidden : `tuple` [`int`]
        Hidden layer widths of the scale and shift networks.
    rng : `numpy.random.Generator` or None, optional
        Random number generator of the initialization. If None, the networks
        are zero and the transform is the identity. (the default is None)
    name : `str`, optional
        Prefix of the parameter names. (the default is "transform")
    mask : `numpy.ndarray` or None, optional
        Conditioning mask with the shape (n_conditions,). If None, all inputs
        are read. (the default is None)
    """

    def __init__(
        self,
        n_conditions: int,
        hidden: typing.Sequence[int],
        rng: np.random.Generator | None = None,
        name: str = "transform",
        mask: np.ndarray | None = None,
    ) -> None:
        self.n_conditions = int(n_conditions)
        self.name = name

        width = max(self.n_conditions, 1)
        self.scale_net = Mlp([width, *hidden, 1], rng=rng, name=f"{name}.scale")
        self.shift_net = Mlp([width, *hidden, 1], rng=rng, name=f"{name}.shift")

        self._mask = np.ones(width)
        if self.n_conditions == 0:
            self._mask[:] = 0.0
        if mask is not None:
            self.mask = mask

    @property
    def mask(self) -> np.ndarray:
        """Conditioning mask of 0 and 1."""
        return self._mask.copy()

    @mask.setter
    def mask(self, value: typing.Any) -> None:
        value = np.asarray(value, dtype=np.float64).reshape(-1)
        if self.n_conditions == 0:
            return

        if len(value) != self.n_conditions:
            raise DimensionError(f"Mask should have {self.n_conditions} entries, got {len(value)}.")

        self._mask = (value != 0.0).astype(np.float64)

    def parameters(self) -> list[Tensor]:
        return self.scale_net.parameters() + self.shift_net.parameters()

    def state_dict(self) -> dict[str, np.ndarray]:
        state = self.scale_net.state_dict()
        state.update(self.shift_net.state_dict())
        state[f"{self.name}.mask"] = self._mask.copy()
        return state

    def load_state_dict(self, state: dict[str, np.ndarray]) -> None:
        self.scale_net.load_state_dict(state)
        self.shift_net.load_state_dict(state)
        if f"{self.name}.mask" in state:
            self._mask = np.asarray(state[f"{self.name}.mask"], dtype=np.float64).copy()

    def set_identity(self) -> None:
        """Make the transform the identity map for every condition."""
        self.scale_net.zero_output_layer()
        self.shift_net.zero_output_layer()

    def _inputs(self, conditions: typing.Any, num: int) -> typing.Any:
        if self.n_conditions == 0:
            return np.zeros((num, 1))

        if conditions.shape[-1] != self.n_conditions:
            raise DimensionError(
                f"{self.name}: conditions should have {self.n_conditions} columns, got {conditions.shape}."
            )

        return conditions * self._mask

    def coefficients(self, conditions: Tensor | np.ndarray, num: int) -> tuple[Tensor, Tensor]:
        """Clamped log-scale and shift with the shape (num,).

        Parameters
        ----------
        conditions : `Tensor`
            Conditioning vectors with the shape (num, n_conditions).
        num : `int`
            Number of rows.

        Returns
        -------
        log_scale : `Tensor`
            Log-scale inside [log 1e-3, log 1e3].
        shift : `Tensor`
            Offset.
        """

        inputs = self._inputs(as_tensor(conditions), num)
        log_scale = clip(self.scale_net.forward(inputs), LOG_SCALE_MINIMUM, LOG_SCALE_MAXIMUM)
        shift = self.shift_net.forward(inputs)
        return log_scale.reshape(num), shift.reshape(num)

    def forward(self, value: Tensor | np.ndarray, conditions: Tensor | np.ndarray) -> tuple[Tensor, Tensor]:
        """Apply the transform.

        Parameters
        ----------
        value : `Tensor`
            Input values with the shape (N,).
        conditions : `Tensor`
            Conditioning vectors with the shape (N, n_conditions).

        Returns
        -------
        output : `Tensor`
            Output values with the shape (N,).
        log_det : `Tensor`
            Log of the derivative of the output with respect to the input.
        """

        value = as_tensor(value)
        log_scale, shift = self.coefficients(conditions, len(value))
        return exp(log_scale) * value + shift, log_scale

    def inverse(self, value: Tensor | np.ndarray, conditions: Tensor | np.ndarray) -> tuple[Tensor, Tensor]:
        """Invert the transform.

        Parameters
        ----------
        value : `Tensor`
            Output values with the shape (N,).
        conditions : `Tensor`
            Conditioning vectors with the shape (N, n_conditions).

        Returns
        -------
        output : `Tensor`
            Input values with the shape (N,).
        log_det : `Tensor`
            Log of the derivative of the inverse map.
        """

        value = as_tensor(value)
        log_scale, shift = self.coefficients(conditions, len(value))
        return (value - shift) * exp(-log_scale), -log_scale

    def _coefficients_array(self, conditions: np.ndarray, num: int) -> tuple[np.ndarray, np.ndarray]:
        inputs = self._inputs(np.asarray(conditions, dtype=np.float64), num)
        log_scale = np.clip(self.scale_net.evaluate(inputs)[:, 0], LOG_SCALE_MINIMUM, LOG_SCALE_MAXIMUM)
        return log_scale, self.shift_net.evaluate(inputs)[:, 0]

    def forward_array(self, value: np.ndarray, conditions: np.ndarray) -> np.ndarray:
        """Apply the transform to arrays without recording the graph."""

        value = np.asarray(value, dtype=np.float64)
        log_scale, shift = self._coefficients_array(conditions, len(value))
        return np.exp(log_scale) * value + shift

    def inverse_array(self, value: np.ndarray, conditions: np.ndarray) -> np.ndarray:
        """Invert the transform on arrays without recording the graph."""

        value = np.asarray(value, dtype=np.float64)
        log_scale, shift = self._coefficients_array(conditions, len(value))
        return (value - shift) * np.exp(-log_scale)
