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

__all__ = ["IdentityDecoder", "CouplingFlowDecoder", "RotationDecoder"]

import typing

import numpy as np
from scipy.stats import special_ortho_group

from ..constants import COUPLING_HIDDEN, COUPLING_LAYERS
from ..diffnum import Mlp
from ..errors import DimensionError


def _check_width(values: typing.Any, width: int, label: str) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    if values.shape[-1:] != (width,):
        raise DimensionError(f"{label} should have the last dimension {width}, got {values.shape}.")

    return values


class IdentityDecoder:
    """Decoder that returns the causal variables as the data.

    Parameters
    ----------
    n : `int`
        Number of causal variables.
    """

    def __init__(self, n: int) -> None:
        self.n = n

    @property
    def latent_dim(self) -> int:
        return self.n

    @property
    def data_dim(self) -> int:
        return self.n

    def decode(self, z: np.ndarray) -> np.ndarray:
        return _check_width(z, self.n, "Causal variables").copy()

    def encode(self, x: np.ndarray) -> np.ndarray:
        return _check_width(x, self.n, "Data").copy()


class CouplingFlowDecoder:
    """Invertible decoder built from affine coupling layers interleaved with
    random permutations.

    Each layer permutes the coordinates, keeps the first half, and maps the
    second half as x_b * exp(tanh(s(x_a))) + t(x_a).

    Parameters
    ----------
    dim : `int`
        Number of dimensions, at least 2.
    rng : `numpy.random.Generator`
        Random number generator of the permutations and the networks.
    n_layers : `int`, optional
        Number of coupling layers. (the default is 5)
    hidden : `tuple` [`int`], optional
        Hidden layer widths of the coupling networks. (the default is
        (64, 64))
    """

    def __init__(
        self,
        dim: int,
        rng: np.random.Generator,
        n_layers: int = COUPLING_LAYERS,
        hidden: typing.Sequence[int] = COUPLING_HIDDEN,
    ) -> None:
        if dim < 2:
            raise DimensionError(f"Coupling flow needs at least 2 dimensions, got {dim}.")

        self.dim = dim
        self.n_layers = n_layers
        self.split = dim // 2

        self.permutations: list[np.ndarray] = list()
        self.scale_nets: list[Mlp] = list()
        self.shift_nets: list[Mlp] = list()
        for idx in range(n_layers):
            self.permutations.append(rng.permutation(dim))
            width = [self.split, *hidden, dim - self.split]
            self.scale_nets.append(Mlp(width, rng=rng, name=f"coupling{idx}.scale"))
            self.shift_nets.append(Mlp(width, rng=rng, name=f"coupling{idx}.shift"))

    @property
    def latent_dim(self) -> int:
        return self.dim

    @property
    def data_dim(self) -> int:
        return self.dim

    def _coupling(self, idx: int, kept: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        log_scale = np.tanh(self.scale_nets[idx].evaluate(kept))
        return log_scale, self.shift_nets[idx].evaluate(kept)

    def _forward(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        value = _check_width(z, self.dim, "Causal variables").reshape(-1, self.dim)
        log_det = np.zeros(len(value))
        for idx, permutation in enumerate(self.permutations):
            value = value[:, permutation]
            kept, moved = value[:, : self.split], value[:, self.split :]
            log_scale, shift = self._coupling(idx, kept)
            value = np.concatenate([kept, moved * np.exp(log_scale) + shift], axis=1)
            log_det += log_scale.sum(axis=1)

        return value, log_det

    def decode(self, z: np.ndarray) -> np.ndarray:
        """Map the causal variables to the data space."""

        z = np.asarray(z, dtype=np.float64)
        value, _ = self._forward(z)
        return value.reshape(z.shape)

    def encode(self, x: np.ndarray) -> np.ndarray:
        """Invert the decoder."""

        x = np.asarray(x, dtype=np.float64)
        value = _check_width(x, self.dim, "Data").reshape(-1, self.dim)
        for idx in reversed(range(self.n_layers)):
            kept, moved = value[:, : self.split], value[:, self.split :]
            log_scale, shift = self._coupling(idx, kept)
            value = np.concatenate([kept, (moved - shift) * np.exp(-log_scale)], axis=1)
            value = value[:, np.argsort(self.permutations[idx])]

        return value.reshape(x.shape)

    def log_det_jacobian(self, z: np.ndarray) -> np.ndarray:
        """Log of the absolute Jacobian determinant of the decoder at z.

        Parameters
        ----------
        z : `numpy.ndarray`
            Causal variables with the shape (N, dim).

        Returns
        -------
        `numpy.ndarray`
            Log-determinants with the shape (N,).
        """

        _, log_det = self._forward(z)
        return log_det


class RotationDecoder:
    """Decoder that applies a random special orthogonal matrix.

    Parameters
    ----------
    n : `int`
        Number of dimensions, at least 2.
    rng : `numpy.random.Generator`
        Random number generator.

    Attributes
    ----------
    matrix : `numpy.ndarray`
        Rotation matrix Q with Q^T Q = I and det(Q) = +1. The data is
        x = Q z.
    """

    def __init__(self, n: int, rng: np.random.Generator) -> None:
        if n < 2:
            raise DimensionError(f"Rotation needs at least 2 dimensions, got {n}.")

        self.n = n
        self.matrix = np.asarray(special_ortho_group.rvs(dim=n, random_state=rng), dtype=np.float64)

    @property
    def latent_dim(self) -> int:
        return self.n

    @property
    def data_dim(self) -> int:
        return self.n

    def decode(self, z: np.ndarray) -> np.ndarray:
        return _check_width(z, self.n, "Causal variables") @ self.matrix.T

    def encode(self, x: np.ndarray) -> np.ndarray:
        return _check_width(x, self.n, "Data") @ self.matrix
