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
from lsst.ts.lcmkit import ContractError, GraphSearchError
from lsst.ts.lcmkit.scm import Dag, enumerate_dags


def test_init() -> None:
    dag = Dag([[0, 1, 1], [0, 0, 1], [0, 0, 0]])

    assert dag.n == 3
    assert dag.edge_count() == 3
    assert dag.parents(2) == [0, 1]
    assert dag.children(0) == [1, 2]
    assert dag.ancestors(2) == {0, 1}
    assert dag.descendants(0) == {1, 2}
    assert dag.edges() == [(0, 1), (0, 2), (1, 2)]
    assert dag.to_list() == [[0, 1, 1], [0, 0, 1], [0, 0, 0]]


def test_init_exception() -> None:
    with pytest.raises(ContractError):
        Dag(np.zeros((2, 3)))

    with pytest.raises(ContractError):
        Dag([[1, 0], [0, 0]])

    with pytest.raises(ContractError):
        Dag([[0, 1], [1, 0]])


def test_adjacency_read_only() -> None:
    dag = Dag.chain(3)

    with pytest.raises(ValueError):
        dag.adjacency[0, 2] = True


def test_empty_chain() -> None:
    assert Dag.empty(3).edge_count() == 0
    assert Dag.chain(4).edges() == [(0, 1), (1, 2), (2, 3)]


def test_random() -> None:
    dag = Dag.random(6, 0.5, np.random.default_rng(0))

    assert dag.is_consistent_with(range(6))
    assert Dag.random(5, 0.0, np.random.default_rng(1)) == Dag.empty(5)
    assert Dag.random(4, 1.0, np.random.default_rng(1)).edge_count() == 6


def test_topological_order() -> None:
    dag = Dag([[0, 0, 0], [0, 0, 0], [1, 1, 0]])

    assert dag.topological_order() == [2, 0, 1]
    assert dag.is_consistent_with([2, 1, 0])
    assert not dag.is_consistent_with([0, 2, 1])


def test_permuted() -> None:
    dag = Dag.chain(3).permuted([2, 1, 0])

    assert dag.edges() == [(1, 0), (2, 1)]


def test_equality() -> None:
    assert Dag.chain(3) == Dag([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    assert Dag.chain(3) != Dag.empty(3)
    assert len({Dag.chain(3), Dag.chain(3), Dag.empty(3)}) == 2


def test_enumerate_dags() -> None:
    assert len(enumerate_dags(1)) == 1
    assert len(enumerate_dags(2)) == 3
    assert len(enumerate_dags(3)) == 25

    dags = enumerate_dags(3)
    assert dags[0] == Dag.empty(3)
    assert [dag.edge_count() for dag in dags] == sorted(dag.edge_count() for dag in dags)
    assert len(set(dags)) == 25


def test_enumerate_dags_four() -> None:
    assert len(enumerate_dags(4)) == 543


def test_enumerate_dags_exception() -> None:
    with pytest.raises(GraphSearchError):
        enumerate_dags(5)
