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
from lsst.ts.lcmkit import ContractError, DimensionError
from lsst.ts.lcmkit.scm import (
    Dag,
    InterventionTarget,
    LinearAdditiveMechanism,
    Scm,
    Toy2DMechanism,
    intervene_sample,
    solve,
    solve_inverse,
)


@pytest.fixture
def scm() -> Scm:
    # 0 -> 1 -> 2 and 0 -> 2
    dag = Dag([[0, 1, 1], [0, 0, 1], [0, 0, 0]])
    mechanisms = [
        LinearAdditiveMechanism(),
        LinearAdditiveMechanism([2.0]),
        LinearAdditiveMechanism([1.0, -1.0]),
    ]
    return Scm(dag, mechanisms)


def test_init_exception() -> None:
    with pytest.raises(ContractError):
        Scm(Dag.chain(2), [LinearAdditiveMechanism()])

    with pytest.raises(ContractError):
        Scm(Dag.chain(2), [LinearAdditiveMechanism(), LinearAdditiveMechanism()])


def test_solve(scm: Scm) -> None:
    noise = np.array([1.0, 0.5, -1.0])

    z = solve(scm, noise)

    assert np.allclose(z, [1.0, 2.5, -2.5])
    assert np.allclose(solve_inverse(scm, z), noise)


def test_solve_batch(scm: Scm) -> None:
    noise = scm.sample_noise(100, np.random.default_rng(0))

    z = scm.solve(noise)

    assert z.shape == (100, 3)
    assert np.allclose(scm.solve_inverse(z), noise)
    assert np.array_equal(scm.solve(noise, order=[0, 1, 2]), z)


def test_solve_exception(scm: Scm) -> None:
    with pytest.raises(ContractError):
        scm.solve(np.zeros(3), order=[1, 0, 2])

    with pytest.raises(DimensionError):
        scm.solve(np.zeros((4, 2)))


def test_intervene_sample(scm: Scm) -> None:
    noise = np.array([1.0, 0.5, -1.0])
    rng = np.random.default_rng(1)

    z_tilde, noise_tilde = intervene_sample(scm, noise, InterventionTarget(frozenset({1})), rng)
    z = scm.solve(noise)

    assert z_tilde[0] == z[0]
    assert z_tilde[1] != z[1]
    assert np.isclose(z_tilde[2], noise[2] + z_tilde[0] - z_tilde[1])
    assert noise_tilde[0] == noise[0]
    assert noise_tilde[2] == noise[2]
    assert np.allclose(scm.solve(noise_tilde), z_tilde)


def test_intervene_sample_empty(scm: Scm) -> None:
    noise = np.array([0.2, -0.3, 0.4])

    z_tilde, noise_tilde = intervene_sample(scm, noise, -1, np.random.default_rng(2))

    assert np.array_equal(z_tilde, scm.solve(noise))
    assert np.array_equal(noise_tilde, noise)


def test_intervene_sample_exception(scm: Scm) -> None:
    with pytest.raises(ContractError):
        intervene_sample(scm, np.zeros(3), 3, np.random.default_rng(0))


def test_intervene_batch_leaf() -> None:
    scm = Scm(Dag.chain(2), [LinearAdditiveMechanism(), Toy2DMechanism()])
    rng = np.random.default_rng(3)
    noise = scm.sample_noise(50, rng)
    z = scm.solve(noise)

    mask = np.zeros((50, 2), dtype=bool)
    mask[:, 1] = True
    z_tilde, noise_tilde = scm.intervene_batch(z, noise, mask, rng)

    assert np.array_equal(z_tilde[:, 0], z[:, 0])
    assert np.array_equal(noise_tilde[:, 0], noise[:, 0])
    assert np.allclose(scm.solve(noise_tilde), z_tilde)
