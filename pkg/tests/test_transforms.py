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
from lsst.ts.lcmkit import ConditionalAffineTransform, DimensionError, Tensor


@pytest.fixture
def transform() -> ConditionalAffineTransform:
    return ConditionalAffineTransform(3, (8, 8), rng=np.random.default_rng(0), name="test")


def test_init_without_rng() -> None:
    transform = ConditionalAffineTransform(2, (4,))
    value = np.array([0.3, -1.2])

    assert np.array_equal(transform.forward_array(value, np.ones((2, 2))), value)


def test_forward_inverse(transform: ConditionalAffineTransform) -> None:
    rng = np.random.default_rng(1)
    value = rng.standard_normal(50)
    conditions = rng.standard_normal((50, 3))

    output, log_det = transform.forward(value, conditions)
    recovered, log_det_inverse = transform.inverse(output, conditions)

    assert np.allclose(recovered.data, value, atol=1e-10)
    assert np.allclose(log_det.data, -log_det_inverse.data)
    assert np.allclose(transform.forward_array(value, conditions), output.data)
    assert np.allclose(transform.inverse_array(output.data, conditions), value, atol=1e-10)


def test_log_det(transform: ConditionalAffineTransform) -> None:
    rng = np.random.default_rng(2)
    value = rng.standard_normal(10)
    conditions = rng.standard_normal((10, 3))
    step = 1e-6

    _, log_det = transform.forward(value, conditions)
    derivative = (
        transform.forward_array(value + step, conditions) - transform.forward_array(value - step, conditions)
    ) / (2.0 * step)

    assert np.allclose(np.log(derivative), log_det.data, atol=1e-5)


def test_mask(transform: ConditionalAffineTransform) -> None:
    transform.mask = [1, 0, 1]
    rng = np.random.default_rng(3)
    value = rng.standard_normal(20)
    conditions = rng.standard_normal((20, 3))

    changed = conditions.copy()
    changed[:, 1] = rng.standard_normal(20)

    assert np.array_equal(transform.mask, [1.0, 0.0, 1.0])
    assert np.array_equal(transform.forward_array(value, conditions), transform.forward_array(value, changed))

    changed[:, 0] += 1.0
    assert not np.allclose(transform.forward_array(value, conditions), transform.forward_array(value, changed))


def test_mask_exception(transform: ConditionalAffineTransform) -> None:
    with pytest.raises(DimensionError):
        transform.mask = [1, 0]

    with pytest.raises(DimensionError):
        transform.forward_array(np.zeros(4), np.zeros((4, 2)))


def test_set_identity(transform: ConditionalAffineTransform) -> None:
    transform.set_identity()
    value = np.linspace(-2.0, 2.0, 5)

    output, log_det = transform.forward(Tensor(value), np.ones((5, 3)))

    assert np.array_equal(output.data, value)
    assert np.array_equal(log_det.data, np.zeros(5))


def test_state_dict(transform: ConditionalAffineTransform) -> None:
    transform.mask = [0, 1, 1]
    other = ConditionalAffineTransform(3, (8, 8), rng=np.random.default_rng(9), name="test")
    other.load_state_dict(transform.state_dict())

    rng = np.random.default_rng(4)
    value = rng.standard_normal(5)
    conditions = rng.standard_normal((5, 3))

    assert np.array_equal(other.mask, transform.mask)
    assert np.array_equal(other.forward_array(value, conditions), transform.forward_array(value, conditions))
