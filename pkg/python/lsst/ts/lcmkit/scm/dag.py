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

__all__ = ["Dag", "enumerate_dags"]

import itertools
import typing

import networkx as nx
import numpy as np

from ..constants import MAX_ENUMERATION_SIZE
from ..errors import ContractError, GraphSearchError


class Dag:
    """Directed acyclic graph over n causal variables.

    Parameters
    ----------
    adjacency : `numpy.ndarray`
        Boolean n x n matrix. The entry (i, j) means the edge i -> j.

    Attributes
    ----------
    n : `int`
        Number of variables.
    adjacency : `numpy.ndarray`
        Read-only boolean adjacency matrix.

    Raises
    ------
    `ContractError`
        If the matrix is not square, has a self-loop, or has a cycle.
    """

    def __init__(self, adjacency: typing.Any) -> None:
        matrix = np.array(adjacency, dtype=bool)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ContractError(f"Adjacency should be a square matrix, got the shape {matrix.shape}.")

        if np.any(np.diag(matrix)):
            raise ContractError("Adjacency should not have self-loops.")

        self._graph = nx.from_numpy_array(matrix.astype(int), create_using=nx.DiGraph)
        if not nx.is_directed_acyclic_graph(self._graph):
            raise ContractError("Adjacency has a cycle.")

        matrix.setflags(write=False)
        self.adjacency = matrix
        self.n = matrix.shape[0]

    @classmethod
    def empty(cls, n: int) -> "Dag":
        """Graph without edges."""
        return cls(np.zeros((n, n), dtype=bool))

    @classmethod
    def chain(cls, n: int) -> "Dag":
        """Graph 0 -> 1 -> ... -> n-1."""
        return cls(np.eye(n, k=1, dtype=bool))

    @classmethod
    def random(cls, n: int, edge_probability: float, rng: np.random.Generator) -> "Dag":
        """Random graph consistent with the order 0, 1, ..., n-1.

        Each edge i -> j with i < j exists independently with the edge
        probability.

        Parameters
        ----------
        n : `int`
            Number of variables.
        edge_probability : `float`
            Probability of each edge.
        rng : `numpy.random.Generator`
            Random number generator.

        Returns
        -------
        `Dag`
            Graph.
        """

        adjacency = np.triu(rng.random((n, n)) < edge_probability, k=1)
        return cls(adjacency)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Dag) and np.array_equal(self.adjacency, other.adjacency)

    def __hash__(self) -> int:
        return hash(self.adjacency.tobytes())

    def __repr__(self) -> str:
        return f"Dag(n={self.n}, edges={self.edges()})"

    def parents(self, idx: int) -> list[int]:
        """Parents of the variable, in increasing order."""
        return [int(parent) for parent in np.flatnonzero(self.adjacency[:, idx])]

    def children(self, idx: int) -> list[int]:
        """Children of the variable, in increasing order."""
        return [int(child) for child in np.flatnonzero(self.adjacency[idx, :])]

    def ancestors(self, idx: int) -> set[int]:
        return set(nx.ancestors(self._graph, idx))

    def descendants(self, idx: int) -> set[int]:
        return set(nx.descendants(self._graph, idx))

    def edges(self) -> list[tuple[int, int]]:
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(self.adjacency))]

    def edge_count(self) -> int:
        return int(self.adjacency.sum())

    def topological_order(self) -> list[int]:
        """Topological order with ties broken by the smallest index."""
        return [int(node) for node in nx.lexicographical_topological_sort(self._graph)]

    def is_consistent_with(self, order: typing.Sequence[int]) -> bool:
        """Every edge points forward in the order or not."""

        position = {node: idx for idx, node in enumerate(order)}
        return all(position[i] < position[j] for i, j in self.edges())

    def permuted(self, permutation: typing.Sequence[int]) -> "Dag":
        """Graph with the variable permutation[k] renamed to k."""

        permutation = np.asarray(permutation)
        return Dag(self.adjacency[np.ix_(permutation, permutation)])

    def to_list(self) -> list[list[int]]:
        """Adjacency matrix as nested lists of 0 and 1."""
        return self.adjacency.astype(int).tolist()


def enumerate_dags(n: int, max_size: int = MAX_ENUMERATION_SIZE) -> list[Dag]:
    """Enumerate all labeled DAGs over n variables.

    Parameters
    ----------
    n : `int`
        Number of variables.
    max_size : `int`, optional
        Largest n accepted. (the default is 4)

    Returns
    -------
    `list` [`Dag`]
        All DAGs, ordered by the number of edges and then by the bit pattern
        of the off-diagonal entries. The empty graph is the first one.

    Raises
    ------
    `GraphSearchError`
        If n is larger than max_size.
    """

    if n > max_size:
        raise GraphSearchError(
            f"Enumerating the DAGs over {n} variables is refused (maximum is {max_size}). "
            "Use the implicit latent causal model instead."
        )

    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]

    dags = list()
    for bits in itertools.product((False, True), repeat=len(pairs)):
        adjacency = np.zeros((n, n), dtype=bool)
        for (i, j), is_edge in zip(pairs, bits):
            adjacency[i, j] = is_edge

        # Skip the 2-cycles quickly before the full check
        if np.any(adjacency & adjacency.T):
            continue

        graph = nx.from_numpy_array(adjacency.astype(int), create_using=nx.DiGraph)
        if nx.is_directed_acyclic_graph(graph):
            dags.append(Dag(adjacency))

    dags.sort(key=lambda dag: dag.edge_count())
    return dags
