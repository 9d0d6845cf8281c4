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

import numpy as np
import pytest
from lsst.ts.lcmkit import DimensionError
from lsst.ts.lcmkit.datasets import CouplingFlowDecoder, IdentityDecoder, RotationDecoder


@pytest.fixture
def z() -> np.ndarray:
    return np.random.default_rng(0).standard_normal((200, 4))


def test_identity_decoder(z: np.ndarray) -> None:
    decoder = IdentityDecoder(4)

    assert decoder.latent_dim == 4
    assert np.array_equal(decoder.decode(z), z)
    assert np.array_equal(decoder.encode(z), z)


def test_rotation_decoder(z: np.ndarray) -> None:
    decoder = RotationDecoder(4, np.random.default_rng(1))
    matrix = decoder.matrix

    assert np.allclose(matrix.T @ matrix, np.eye(4), atol=1e-12)
    assert np.isclose(np.linalg.det(matrix), 1.0)
    assert np.allclose(decoder.encode(decoder.decode(z)), z, atol=1e-8)
    assert np.allclose(np.linalg.norm(decoder.decode(z), axis=1), np.linalg.norm(z, axis=1))


def test_rotation_decoder_deterministic() -> None:
    first = RotationDecoder(3, np.random.default_rng(5))
    second = RotationDecoder(3, np.random.default_rng(5))

    assert np.array_equal(first.matrix, second.matrix)


def test_rotation_decoder_exception(z: np.ndarray) -> None:
    with pytest.raises(DimensionError):
        RotationDecoder(1, np.random.default_rng(0))

    with pytest.raises(DimensionError):
        RotationDecoder(3, np.random.default_rng(0)).decode(z)


def test_coupling_flow_decoder(z: np.ndarray) -> None:
    decoder = CouplingFlowDecoder(4, np.random.default_rng(2), hidden=(16, 16))

    x = decoder.decode(z)

    assert x.shape == z.shape
    assert not np.allclose(x, z)
    assert np.allclose(decoder.encode(x), z, atol=1e-8)
    assert np.allclose(decoder.decode(z[0]), x[0])


def test_coupling_flow_log_det() -> None:
    decoder = CouplingFlowDecoder(2, np.random.default_rng(3), n_layers=3, hidden=(8,))
    point = np.array([[0.4, -0.7]])
    step = 1e-6

    jacobian = np.zeros((2, 2))
    for idx in range(2):
        offset = np.zeros((1, 2))
        offset[0, idx] = step
        jacobian[:, idx] = (decoder.decode(point + offset) - decoder.decode(point - offset))[0] / (2.0 * step)

    expected = np.log(np.abs(np.linalg.det(jacobian)))
    assert np.isclose(decoder.log_det_jacobian(point)[0], expected, atol=1e-5)


def test_coupling_flow_exception() -> None:
    with pytest.raises(DimensionError):
        CouplingFlowDecoder(1, np.random.default_rng(0))
