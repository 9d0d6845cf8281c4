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

import typing

import numpy as np
import pytest
from lsst.ts.lcmkit.diffnum import Tensor, gradients


def pytest_addoption(parser: pytest.Parser) -> None:
    parser.addoption("--run-slow", action="store_true", default=False, help="Run the slow reproductions.")


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "slow: end-to-end reproduction that trains full models")


def pytest_collection_modifyitems(config: pytest.Config, items: list[pytest.Item]) -> None:
    if config.getoption("--run-slow"):
        return

    skip_slow = pytest.mark.skip(reason="Needs --run-slow.")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def _check_parameter_gradients(
    loss_fn: typing.Callable[[], Tensor],
    params: list[Tensor],
    seed: int = 0,
    step: float = 1e-7,
) -> None:
    """Compare the gradient of every parameter with the central difference
    along a random direction of that parameter."""

    grads = gradients(loss_fn(), params)
    rng = np.random.default_rng(seed)
    for param, grad in zip(params, grads):
        direction = rng.standard_normal(param.shape)
        original = param.data.copy()

        param.data[...] = original + step * direction
        upper = loss_fn().item()
        param.data[...] = original - step * direction
        lower = loss_fn().item()
        param.data[...] = original

        expected = (upper - lower) / (2.0 * step)
        assert np.sum(grad.data * direction) == pytest.approx(expected, rel=1e-4, abs=1e-5), param.name


@pytest.fixture
def check_parameter_gradients() -> typing.Callable[..., None]:
    return _check_parameter_gradients
