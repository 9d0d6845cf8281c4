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
from lsst.ts.lcmkit.diffnum import Mlp, Tensor, forward_mlp, gradients


@pytest.fixture
def net() -> Mlp:
    return Mlp([3, 16, 16, 2], rng=np.random.default_rng(0), name="net")


def test_init(net: Mlp) -> None:
    assert net.input_width == 3
    assert net.output_width == 2
    assert len(net.parameters()) == 6
    assert net.weights[0].shape == (3, 16)
    assert net.parameters()[0].name == "net.weight0"


def test_init_exception() -> None:
    with pytest.raises(DimensionError):
        Mlp([3])

    with pytest.raises(DimensionError):
        Mlp([3, 0, 1])


def test_init_zero() -> None:
    net = Mlp([2, 4, 1])

    assert np.array_equal(net.evaluate(np.ones((5, 2))), np.zeros((5, 1)))


def test_forward(net: Mlp) -> None:
    value = np.random.default_rng(1).standard_normal((10, 3))

    output = forward_mlp(net, Tensor(value))

    assert output.shape == (10, 2)
    assert np.allclose(output.data, net.evaluate(value))


def test_forward_exception(net: Mlp) -> None:
    with pytest.raises(DimensionError):
        net.forward(Tensor(np.zeros((4, 2))))

    with pytest.raises(DimensionError):
        net.evaluate(np.zeros((4, 5)))


def test_gradient(net: Mlp) -> None:
    value = np.random.default_rng(2).standard_normal((6, 3))
    params = net.parameters()
    grads = gradients((net.forward(value) ** 2).sum(), params)

    # Central difference of one weight entry
    step = 1e-6
    weight = net.weights[1]
    weight.data[2, 3] += step
    upper = float((net.evaluate(value) ** 2).sum())
    weight.data[2, 3] -= 2.0 * step
    lower = float((net.evaluate(value) ** 2).sum())
    weight.data[2, 3] += step

    assert np.isclose(grads[2].data[2, 3], (upper - lower) / (2.0 * step), rtol=1e-4, atol=1e-6)


def test_zero_output_layer(net: Mlp) -> None:
    net.zero_output_layer()

    assert np.array_equal(net.evaluate(np.ones((3, 3))), np.zeros((3, 2)))


def test_state_dict(net: Mlp) -> None:
    other = Mlp([3, 16, 16, 2], rng=np.random.default_rng(5), name="net")
    other.load_state_dict(net.state_dict())
    value = np.ones((2, 3))

    assert np.array_equal(other.evaluate(value), net.evaluate(value))


def test_load_state_dict_exception(net: Mlp) -> None:
    state = net.state_dict()
    state["net.weight0"] = np.zeros((2, 2))

    with pytest.raises(DimensionError):
        net.load_state_dict(state)

    state.pop("net.weight0")
    with pytest.raises(DimensionError):
        net.load_state_dict(state)
