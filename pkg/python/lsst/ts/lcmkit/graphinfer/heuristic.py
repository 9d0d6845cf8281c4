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

__all__ = [
    "AncestryMatrix",
    "InferredGraph",
    "LearnedMechanism",
    "encoding_medians",
    "ancestry_scores",
    "topological_order",
    "extract_mechanisms",
    "causal_medians",
    "paternity_prune",
    "infer_graph_heuristic",
]

import logging
import typing
from dataclasses import dataclass

import numpy as np

from ..constants import PATERNITY_MINIMUM, PATERNITY_RELATIVE_THRESHOLD
from ..errors import ContractError, DimensionError, NumericalError
from ..scm import Dag

if typing.TYPE_CHECKING:
    from ..ilcm import IlcmModel

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AncestryMatrix:
    """Ancestry heuristic between the learned variables.

    Parameters
    ----------
    scores : `numpy.ndarray`
        Nonnegative n x n matrix. The entry (i, j) measures how much the
        solution function of j changes when e_i is masked. The diagonal is 0.
    distance : `str`
        Distance measure.
    baseline : `numpy.ndarray`
        Mask value of each noise encoding.
    """

    scores: np.ndarray
    distance: str
    baseline: np.ndarray

    def __post_init__(self) -> None:
        scores = np.asarray(self.scores, dtype=np.float64)
        if scores.ndim != 2 or scores.shape[0] != scores.shape[1]:
            raise DimensionError(f"Scores should be a square matrix, got the shape {scores.shape}.")

        if not np.all(np.isfinite(scores)) or np.any(scores < 0.0):
            raise ContractError("Ancestry scores should be finite and nonnegative.")

        object.__setattr__(self, "scores", scores)

    @property
    def n(self) -> int:
        return self.scores.shape[0]


@dataclass(frozen=True)
class InferredGraph:
    """Graph inferred from a trained implicit model.

    Parameters
    ----------
    dag : `Dag`
        Inferred graph.
    order : `list` [`int`]
        Topological order the graph is consistent with.
    paternity : `numpy.ndarray`
        Paternity scores. The entry (i, j) is nonzero only if i comes before
        j in the order.
    p_min : `float`
        Threshold of the edges.
    ancestry : `AncestryMatrix` or None, optional
        Ancestry scores the order was derived from. (the default is None)
    """

    dag: Dag
    order: list[int]
    paternity: np.ndarray
    p_min: float
    ancestry: AncestryMatrix | None = None

    def __post_init__(self) -> None:
        if not self.dag.is_consistent_with(self.order):
            raise ContractError(f"Graph is not consistent with the order {self.order}.")

    def to_dict(self) -> dict[str, typing.Any]:
        """JSON serializable report."""

        return {
            "adjacency": self.dag.to_list(),
            "order": list(self.order),
            "paternity": self.paternity.tolist(),
            "p_min": float(self.p_min),
            "ancestry": None if self.ancestry is None else self.ancestry.scores.tolist(),
        }


def encoding_medians(model: "IlcmModel", x: np.ndarray) -> np.ndarray:
    """Median of each noise encoding over the data.

    Parameters
    ----------
    model : `IlcmModel`
        Model.
    x : `numpy.ndarray`
        Data with the shape (N, data_dim).

    Returns
    -------
    `numpy.ndarray`
        Medians with the shape (n,).

    Raises
    ------
    `ContractError`
        If the data is empty.
    """

    x = np.atleast_2d(x)
    if len(x) == 0:
        raise ContractError("Medians need at least one sample.")

    return np.median(model.encode_mean(x), axis=0)


def ancestry_scores(
    model: "IlcmModel",
    validation_x: np.ndarray,
    baseline: np.ndarray | None = None,
) -> AncestryMatrix:
    """Expected squared change of s_j(e_j; e) when e_i is replaced by its
    mask value.

    Parameters
    ----------
    model : `IlcmModel`
        Trained model.
    validation_x : `numpy.ndarray`
        Validation data with the shape (N, data_dim).
    baseline : `numpy.ndarray` or None, optional
        Mask values of the noise encodings, usually the medians over the
        training data. If None, the medians over the validation data. (the
        default is None)

    Returns
    -------
    `AncestryMatrix`
        Scores.

    Raises
    ------
    `ContractError`
        If the validation data is empty.
    """

    validation_x = np.atleast_2d(validation_x)
    if len(validation_x) == 0:
        raise ContractError("Ancestry scores need validation data.")

    e = model.encode_mean(validation_x)
    baseline = np.median(e, axis=0) if baseline is None else np.asarray(baseline, dtype=np.float64)

    n = model.n
    outputs = [model.solution_forward(idx, e[:, idx], e) for idx in range(n)]

    scores = np.zeros((n, n))
    for masked_idx in range(n):
        masked = e.copy()
        masked[:, masked_idx] = baseline[masked_idx]
        for idx in range(n):
            if idx == masked_idx:
                continue
            changed = model.solution_forward(idx, e[:, idx], masked)
            scores[masked_idx, idx] = np.mean((changed - outputs[idx]) ** 2)

    return AncestryMatrix(scores=scores, distance="mse", baseline=baseline)


def topological_order(scores: AncestryMatrix | np.ndarray) -> list[int]:
    """Greedy order that puts likely ancestors first.

    The variable with the smallest sum of incoming scores from the remaining
    variables comes next. Ties go to the smallest index.

    Parameters
    ----------
    scores : `AncestryMatrix` or `numpy.ndarray`
        Ancestry scores.

    Returns
    -------
    `list` [`int`]
        Permutation of the variables.
    """

    matrix = scores.scores if isinstance(scores, AncestryMatrix) else np.asarray(scores, dtype=np.float64)
    matrix = matrix.copy()
    np.fill_diagonal(matrix, 0.0)

    remaining = list(range(matrix.shape[0]))
    order = list()
    while remaining:
        incoming = matrix[np.ix_(remaining, remaining)].sum(axis=0)
        chosen = remaining[int(np.argmin(incoming))]
        order.append(chosen)
        remaining.remove(chosen)

    return order


class LearnedMechanism:
    """Causal mechanism z_j = f_j(e_j; z_anc) extracted from the solution
    functions.

    The noise encodings of the ancestors are recovered from their causal
    variables in the topological order. The other noise encodings are held
    at their mask values.

    Parameters
    ----------
    model : `IlcmModel`
        Trained model.
    idx : `int`
        Index of the variable.
    ancestors : `list` [`int`]
        Variables before idx in the topological order, in that order.
    baseline : `numpy.ndarray`
        Mask values of the noise encodings.
    """

    def __init__(
        self,
        model: "IlcmModel",
        idx: int,
        ancestors: typing.Sequence[int],
        baseline: np.ndarray,
    ) -> None:
        self.model = model
        self.idx = idx
        self.ancestors = list(ancestors)
        self.baseline = np.asarray(baseline, dtype=np.float64)

    def _noise(self, z: np.ndarray) -> np.ndarray:
        z = np.atleast_2d(z)
        e_hat = np.tile(self.baseline, (len(z), 1))
        for ancestor in self.ancestors:
            e_hat[:, ancestor] = self.model.solution_inverse(ancestor, z[:, ancestor], e_hat)

        if not np.all(np.isfinite(e_hat)):
            raise NumericalError("Mechanism is not invertible at the requested point.", self.idx)

        return e_hat

    def forward(self, e_idx: np.ndarray, z: np.ndarray) -> np.ndarray:
        """Causal variable from its noise and the ancestors.

        Parameters
        ----------
        e_idx : `numpy.ndarray`
            Noise encodings of the variable with the shape (N,).
        z : `numpy.ndarray`
            Causal variables with the shape (N, n). Only the ancestor columns
            are read.

        Returns
        -------
        `numpy.ndarray`
            Causal variable with the shape (N,).
        """
        return self.model.solution_forward(self.idx, np.asarray(e_idx, dtype=np.float64), self._noise(z))

    def inverse(self, z_idx: np.ndarray, z: np.ndarray) -> np.ndarray:
        """Noise of the variable given the causal variables."""
        return self.model.solution_inverse(self.idx, np.asarray(z_idx, dtype=np.float64), self._noise(z))


def extract_mechanisms(
    model: "IlcmModel",
    order: typing.Sequence[int],
    baseline: np.ndarray,
) -> list[LearnedMechanism]:
    """Causal mechanisms of all variables, indexed by variable.

    Parameters
    ----------
    model : `IlcmModel`
        Trained model.
    order : `list` [`int`]
        Topological order.
    baseline : `numpy.ndarray`
        Mask values of the noise encodings.

    Returns
    -------
    `list` [`LearnedMechanism`]
        Mechanism of each variable.

    Raises
    ------
    `ContractError`
        If the order is not a permutation.
    """

    order = [int(node) for node in order]
    if sorted(order) != list(range(model.n)):
        raise ContractError(f"{order} is not a permutation of {model.n} variables.")

    mechanisms: list[LearnedMechanism | None] = [None] * model.n
    for position, idx in enumerate(order):
        mechanisms[idx] = LearnedMechanism(model, idx, order[:position], baseline)

    return typing.cast(list[LearnedMechanism], mechanisms)


def _causal_from_noise(
    mechanisms: typing.Sequence[LearnedMechanism],
    order: typing.Sequence[int],
    e: np.ndarray,
) -> np.ndarray:
    z = np.zeros_like(e)
    for idx in order:
        z[:, idx] = mechanisms[idx].forward(e[:, idx], z)

    return z


def causal_medians(
    mechanisms: typing.Sequence[LearnedMechanism],
    order: typing.Sequence[int],
    e: np.ndarray,
) -> np.ndarray:
    """Median of each causal variable rebuilt from the noise encodings.

    Parameters
    ----------
    mechanisms : `list` [`LearnedMechanism`]
        Mechanism of each variable.
    order : `list` [`int`]
        Topological order.
    e : `numpy.ndarray`
        Noise encodings with the shape (N, n).

    Returns
    -------
    `numpy.ndarray`
        Medians with the shape (n,).

    Raises
    ------
    `ContractError`
        If the data is empty.
    """

    e = np.atleast_2d(np.asarray(e, dtype=np.float64))
    if len(e) == 0:
        raise ContractError("Medians need at least one sample.")

    return np.median(_causal_from_noise(mechanisms, [int(node) for node in order], e), axis=0)


def paternity_prune(
    mechanisms: typing.Sequence[LearnedMechanism],
    order: typing.Sequence[int],
    e: np.ndarray,
    p_min: float | None = None,
    mask_values: np.ndarray | None = None,
) -> InferredGraph:
    """Keep the edge i -> j if i comes before j and masking z_i changes f_j
    by more than the threshold.

    Parameters
    ----------
    mechanisms : `list` [`LearnedMechanism`]
        Mechanism of each variable.
    order : `list` [`int`]
        Topological order.
    e : `numpy.ndarray`
        Noise encodings of the data with the shape (N, n).
    p_min : `float` or None, optional
        Threshold. If None, a fixed fraction of the largest paternity score
        and at least 1e-12. (the default is None)
    mask_values : `numpy.ndarray` or None, optional
        Value of each masked causal variable, usually the medians over the
        training data. If None, the medians over e. (the default is None)

    Returns
    -------
    `InferredGraph`
        Graph.

    Raises
    ------
    `ContractError`
        If p_min is not positive or the data is empty.
    `DimensionError`
        If the number of mask values does not match.
    """

    if p_min is not None and not p_min > 0.0:
        raise ContractError(f"p_min should be > 0, got {p_min}.")

    e = np.atleast_2d(np.asarray(e, dtype=np.float64))
    if len(e) == 0:
        raise ContractError("Paternity scores need data.")

    n = len(mechanisms)
    order = [int(node) for node in order]
    z = _causal_from_noise(mechanisms, order, e)
    if mask_values is None:
        mask_values = np.median(z, axis=0)
    else:
        mask_values = np.asarray(mask_values, dtype=np.float64)
        if mask_values.shape != (n,):
            raise DimensionError(f"Mask values should have the shape ({n},), got {mask_values.shape}.")

    paternity = np.zeros((n, n))
    for position, idx in enumerate(order):
        output = mechanisms[idx].forward(e[:, idx], z)
        for ancestor in order[:position]:
            masked = z.copy()
            masked[:, ancestor] = mask_values[ancestor]
            changed = mechanisms[idx].forward(e[:, idx], masked)
            paternity[ancestor, idx] = np.mean((changed - output) ** 2)

    if p_min is None:
        p_min = max(PATERNITY_RELATIVE_THRESHOLD * float(paternity.max()), PATERNITY_MINIMUM)

    dag = Dag(paternity > p_min)
    log.debug("Paternity threshold %.3g keeps %d edges.", p_min, dag.edge_count())

    return InferredGraph(dag=dag, order=order, paternity=paternity, p_min=float(p_min))


def infer_graph_heuristic(
    model: "IlcmModel",
    train_x: np.ndarray,
    validation_x: np.ndarray,
    p_min: float | None = None,
) -> InferredGraph:
    """Infer the graph from the solution functions of a trained model.

    The steps are the ancestry scores, the greedy topological order, the
    extraction of the mechanisms, and the pruning by the paternity scores.

    Parameters
    ----------
    model : `IlcmModel`
        Trained model.
    train_x : `numpy.ndarray`
        Training data, which defines the mask values of the noise encodings
        and of the causal variables.
    validation_x : `numpy.ndarray`
        Validation data, which defines the expectations.
    p_min : `float` or None, optional
        Threshold of the paternity scores. (the default is None)

    Returns
    -------
    `InferredGraph`
        Graph with the ancestry scores.
    """

    baseline = encoding_medians(model, train_x)
    scores = ancestry_scores(model, validation_x, baseline=baseline)
    order = topological_order(scores)
    mechanisms = extract_mechanisms(model, order, baseline)

    mask_values = causal_medians(mechanisms, order, model.encode_mean(np.atleast_2d(train_x)))
    graph = paternity_prune(
        mechanisms,
        order,
        model.encode_mean(np.atleast_2d(validation_x)),
        p_min=p_min,
        mask_values=mask_values,
    )
    return InferredGraph(
        dag=graph.dag,
        order=graph.order,
        paternity=graph.paternity,
        p_min=graph.p_min,
        ancestry=scores,
    )
