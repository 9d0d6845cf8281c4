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

__all__ = ["Activation", "Mlp", "forward_mlp"]

from enum import Enum

import numpy as np

from ..errors import DimensionError
from .tensor import Tensor, as_tensor, matmul, relu


class Activation(str, Enum):
    """Activation function of the hidden layers."""

    ReLU = "relu"


class Mlp:
    """Fully connected network with ReLU hidden layers and a linear output.

    Parameters
    ----------
    layer_widths : `list` [`int`]
        Widths from the input to the output, e.g. [2, 100, 100, 1].
    rng : `numpy.random.Generator` or None, optional
        Random number generator of the Kaiming-uniform initialization. If
        None, all weights and biases are zero. (the default is None)
    name : `str`, optional
        Prefix of the parameter names. (the default is "mlp")

    Attributes
    ----------
    layer_widths : `list` [`int`]
        Widths of the layers.
    weights : `list` [`Tensor`]
        Weight matrices with the shape (width_in, width_out).
    biases : `list` [`Tensor`]
        Bias vectors.
    activation : `Activation`
        Activation of the hidden layers.
    name : `str`
        Name.

    Raises
    ------
    `DimensionError`
        If fewer than two widths are given or a width is not positive.
    """

    def __init__(
        self,
        layer_widths: list[int] | tuple[int, ...],
        rng: np.random.Generator | None = None,
        name: str = "mlp",
    ) -> None:
        if len(layer_widths) < 2 or any(int(width) < 1 for width in layer_widths):
            raise DimensionError(f"Invalid layer widths: {layer_widths}.")

        self.layer_widths = [int(width) for width in layer_widths]
        self.activation = Activation.ReLU
        self.name = name

        self.weights: list[Tensor] = list()
        self.biases: list[Tensor] = list()
        for idx, (fan_in, fan_out) in enumerate(zip(self.layer_widths[:-1], self.layer_widths[1:])):
            if rng is None:
                weight = np.zeros((fan_in, fan_out))
                bias = np.zeros(fan_out)
            else:
                bound_weight = np.sqrt(6.0 / fan_in)
                bound_bias = 1.0 / np.sqrt(fan_in)
                weight = rng.uniform(-bound_weight, bound_weight, size=(fan_in, fan_out))
                bias = rng.uniform(-bound_bias, bound_bias, size=fan_out)

            self.weights.append(Tensor(weight, requires_grad=True, name=f"{name}.weight{idx}"))
            self.biases.append(Tensor(bias, requires_grad=True, name=f"{name}.bias{idx}"))

    @property
    def input_width(self) -> int:
        return self.layer_widths[0]

    @property
    def output_width(self) -> int:
        return self.layer_widths[-1]

    def parameters(self) -> list[Tensor]:
        """Parameters in a fixed order.

        Returns
        -------
        `list` [`Tensor`]
            Weights and biases, layer by layer.
        """

        params = list()
        for weight, bias in zip(self.weights, self.biases):
            params += [weight, bias]

        return params

    def forward(self, value: Tensor) -> Tensor:
        """Evaluate the network.

        Parameters
        ----------
        value : `Tensor`
            Input with the shape (..., input_width).

        Returns
        -------
        `Tensor`
            Output with the shape (..., output_width).

        Raises
        ------
        `DimensionError`
            If the last dimension of input does not match.
        """

        value = as_tensor(value)
        if value.ndim == 0 or value.shape[-1] != self.input_width:
            raise DimensionError(
                f"{self.name}: input last dimension should be {self.input_width}, got {value.shape}."
            )

        num_layers = len(self.weights)
        for idx, (weight, bias) in enumerate(zip(self.weights, self.biases)):
            value = matmul(value, weight) + bias
            if idx < num_layers - 1:
                value = relu(value)

        return value

    def evaluate(self, value: np.ndarray) -> np.ndarray:
        """Evaluate the network on arrays without recording the graph.

        Parameters
        ----------
        value : `numpy.ndarray`
            Input with the shape (..., input_width).

        Returns
        -------
        `numpy.ndarray`
            Output with the shape (..., output_width).
        """

        value = np.asarray(value, dtype=np.float64)
        if value.ndim == 0 or value.shape[-1] != self.input_width:
            raise DimensionError(
                f"{self.name}: input last dimension should be {self.input_width}, got {value.shape}."
            )

        num_layers = len(self.weights)
        for idx, (weight, bias) in enumerate(zip(self.weights, self.biases)):
            value = value @ weight.data + bias.data
            if idx < num_layers - 1:
                value = np.maximum(value, 0.0)

        return value

    def zero_output_layer(self) -> None:
        """Set the weights and bias of the output layer to zero, so that the
        network outputs zero everywhere."""
        self.weights[-1].data[...] = 0.0
        self.biases[-1].data[...] = 0.0

    def state_dict(self) -> dict[str, np.ndarray]:
        """Copy of the parameters keyed by name."""
        return {param.name: param.data.copy() for param in self.parameters()}

    def load_state_dict(self, state: dict[str, np.ndarray]) -> None:
        """Load the parameters.

        Parameters
        ----------
        state : `dict`
            Parameters keyed by name.

        Raises
        ------
        `DimensionError`
            If a parameter is missing or has a different shape.
        """

        for param in self.parameters():
            if param.name not in state:
                raise DimensionError(f"Missing parameter: {param.name}.")

            value = np.asarray(state[param.name], dtype=np.float64)
            if value.shape != param.shape:
                raise DimensionError(f"Shape of {param.name} should be {param.shape}, got {value.shape}.")

            param.data[...] = value


def forward_mlp(net: Mlp, value: Tensor) -> Tensor:
    """Evaluate the network.

    Parameters
    ----------
    net : `Mlp`
        Network.
    value : `Tensor`
        Input with the shape (..., input_width).

    Returns
    -------
    `Tensor`
        Output with the shape (..., output_width).
    """
    return net.forward(value)
