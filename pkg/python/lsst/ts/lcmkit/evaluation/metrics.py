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
    "ImportanceMatrix",
    "DciScores",
    "importance_matrix",
    "dci",
    "intervention_accuracy",
    "match_variables",
    "shd",
]

import itertools
import logging
import typing
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.stats import entropy
from sklearn.ensemble import GradientBoostingRegressor
from sklearn.model_selection import train_test_split

from ..constants import EXHAUSTIVE_PERMUTATION_MAX, MIN_IMPORTANCE_SAMPLES
from ..errors import ContractError, DimensionError
from ..scm import Dag
from ..utils import run_in_workers_sync

log = logging.getLogger(__name__)

# Regressor of the importance matrix
GBR_PARAMETERS = dict(n_estimators=100, max_depth=3, learning_rate=0.1, loss="squared_error")


@dataclass(frozen=True)
class ImportanceMatrix:
    """Importance of each latent for predicting each factor.

    Parameters
    ----------
    matrix : `numpy.ndarray`
        Nonnegative matrix with the shape (n_latents, n_factors).
    errors : `numpy.ndarray` or None, optional
        Test mean squared error of each factor divided by its variance.
        (the default is None)
    """

    matrix: np.ndarray
    errors: np.ndarray | None = None

    def __post_init__(self) -> None:
        matrix = np.asarray(self.matrix, dtype=np.float64)
        if matrix.ndim != 2:
            raise DimensionError(f"Importance matrix should be 2D, got the shape {matrix.shape}.")

        if not np.all(np.isfinite(matrix)) or np.any(matrix < 0.0):
            raise ContractError("Importance matrix should be finite and nonnegative.")

        object.__setattr__(self, "matrix", matrix)
        if self.errors is not None:
            object.__setattr__(self, "errors", np.asarray(self.errors, dtype=np.float64))

    @property
    def n_latents(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_factors(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class DciScores:
    """Disentanglement, completeness, and informativeness.

    The disentanglement and completeness are in [0, 1] with 1 the best. The
    informativeness is the normalized test error with 0 the best.
    """

    disentanglement: float
    completeness: float
    informativeness: float


def _fit_factor(
    latents_train: np.ndarray,
    latents_test: np.ndarray,
    factor_train: np.ndarray,
    factor_test: np.ndarray,
    seed: int,
) -> tuple[np.ndarray, float]:
    regressor = GradientBoostingRegressor(random_state=seed, **GBR_PARAMETERS)
    regressor.fit(latents_train, factor_train)

    variance = factor_test.var()
    error = np.mean((regressor.predict(latents_test) - factor_test) ** 2)
    return regressor.feature_importances_, float(error / variance) if variance > 0.0 else 0.0


def importance_matrix(
    latents: np.ndarray,
    factors: np.ndarray,
    test_fraction: float = 0.2,
    seed: int = 0,
    workers: int = 1,
) -> ImportanceMatrix:
    """Importance matrix from one gradient boosted tree ensemble per factor.

    Parameters
    ----------
    latents : `numpy.ndarray`
        Learned representation with the shape (N, n_latents).
    factors : `numpy.ndarray`
        True factors with the shape (N, n_factors).
    test_fraction : `float`, optional
        Fraction of the samples held out for the errors. (the default is
        0.2)
    seed : `int`, optional
        Seed of the split and the regressors. (the default is 0)
    workers : `int`, optional
        Number of factors fitted at the same time. (the default is 1)

    Returns
    -------
    `ImportanceMatrix`
        Matrix and the normalized test errors.

    Raises
    ------
    `DimensionError`
        If the sample counts differ.
    `ContractError`
        If there are fewer than 1000 samples.
    """

    latents = np.atleast_2d(np.asarray(latents, dtype=np.float64))
    factors = np.atleast_2d(np.asarray(factors, dtype=np.float64))
    if len(latents) != len(factors):
        raise DimensionError(f"Sample counts differ: {len(latents)} latents, {len(factors)} factors.")

    if len(latents) < MIN_IMPORTANCE_SAMPLES:
        raise ContractError(f"Importance matrix needs {MIN_IMPORTANCE_SAMPLES} samples, got {len(latents)}.")

    latents_train, latents_test, factors_train, factors_test = train_test_split(
        latents, factors, test_size=test_fraction, random_state=seed
    )

    n_latents = latents.shape[1]
    constant = [idx for idx in range(factors.shape[1]) if np.ptp(factors_train[:, idx]) == 0.0]
    for idx in constant:
        log.warning("Factor %d is constant; its importance column is uniform.", idx)

    fitted = [idx for idx in range(factors.shape[1]) if idx not in constant]
    results = run_in_workers_sync(
        [
            lambda idx=idx: _fit_factor(latents_train, latents_test, factors_train[:, idx], factors_test[:, idx], seed)
            for idx in fitted
        ],
        workers=workers,
    )

    matrix = np.full((n_latents, factors.shape[1]), 1.0 / n_latents)
    errors = np.zeros(factors.shape[1])
    for idx, (importances, error) in zip(fitted, results):
        matrix[:, idx] = importances
        errors[idx] = error

    return ImportanceMatrix(matrix=matrix, errors=errors)


def _weighted_specificity(matrix: np.ndarray) -> float:
    """Mass-weighted 1 - normalized entropy of the rows."""

    num_columns = matrix.shape[1]
    masses = matrix.sum(axis=1)
    if num_columns == 1:
        return 1.0

    scores = np.zeros(len(matrix))
    for idx, mass in enumerate(masses):
        if mass > 0.0:
            scores[idx] = 1.0 - entropy(matrix[idx] / mass, base=num_columns)

    weights = masses / masses.sum()
    return float(np.clip(np.sum(weights * scores), 0.0, 1.0))


def dci(
    importance: ImportanceMatrix | np.ndarray,
    errors: np.ndarray | None = None,
) -> DciScores:
    """DCI scores of an importance matrix.

    Parameters
    ----------
    importance : `ImportanceMatrix` or `numpy.ndarray`
        Importance matrix with the shape (n_latents, n_factors).
    errors : `numpy.ndarray` or None, optional
        Normalized test errors. If None, the errors stored in the importance
        matrix; NaN if there are none. (the default is None)

    Returns
    -------
    `DciScores`
        Scores.
    """

    if not isinstance(importance, ImportanceMatrix):
        importance = ImportanceMatrix(matrix=importance)

    if errors is None:
        errors = importance.errors

    informativeness = float(np.mean(errors)) if errors is not None and len(errors) > 0 else float("nan")

    matrix = importance.matrix
    if matrix.sum() == 0.0:
        log.warning("Importance matrix is all zero; disentanglement and completeness are 0.")
        return DciScores(disentanglement=0.0, completeness=0.0, informativeness=informativeness)

    return DciScores(
        disentanglement=_weighted_specificity(matrix),
        completeness=_weighted_specificity(matrix.T),
        informativeness=informativeness,
    )


def _best_matching_score(confusion: np.ndarray) -> float:
    n = len(confusion)
    if n <= EXHAUSTIVE_PERMUTATION_MAX:
        permutations = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
        return float(confusion[np.arange(n), permutations].sum(axis=1).max())

    rows, columns = linear_sum_assignment(confusion, maximize=True)
    return float(confusion[rows, columns].sum())


def intervention_accuracy(
    posteriors: typing.Any,
    true_targets: np.ndarray,
    n: int,
) -> float:
    """Accuracy of the most likely targets, maximized over the relabelings of
    the variables.

    The empty target keeps its label.

    Parameters
    ----------
    posteriors : `InterventionPosterior` or `numpy.ndarray`
        Posteriors with the shape (N, n + 1).
    true_targets : `numpy.ndarray`
        True target indices, -1 for the empty target.
    n : `int`
        Number of variables.

    Returns
    -------
    `float`
        Accuracy in [0, 1].

    Raises
    ------
    `DimensionError`
        If the shapes do not match.
    """

    probs = np.atleast_2d(np.asarray(getattr(posteriors, "probs", posteriors), dtype=np.float64))
    true_targets = np.asarray(true_targets, dtype=np.int64)
    if probs.shape[1] != n + 1 or len(probs) != len(true_targets):
        raise DimensionError(f"Posteriors {probs.shape} do not match {len(true_targets)} targets of {n} variables.")

    if len(true_targets) == 0:
        raise ContractError("Accuracy needs at least one pair.")

    predicted = np.argmax(probs, axis=1)
    confusion = np.zeros((n + 1, n + 1))
    np.add.at(confusion, (true_targets + 1, predicted), 1.0)

    correct = confusion[0, 0] + _best_matching_score(confusion[1:, 1:])
    return correct / len(true_targets)


def match_variables(importance: ImportanceMatrix | np.ndarray) -> np.ndarray:
    """Latent matched to each factor by maximizing the total importance.

    Parameters
    ----------
    importance : `ImportanceMatrix` or `numpy.ndarray`
        Importance matrix with the shape (n_latents, n_factors).

    Returns
    -------
    `numpy.ndarray`
        Array m with m[factor] = latent.
    """

    matrix = importance.matrix if isinstance(importance, ImportanceMatrix) else np.asarray(importance)
    rows, columns = linear_sum_assignment(matrix, maximize=True)

    matching = np.zeros(matrix.shape[1], dtype=np.int64)
    matching[columns] = rows
    return matching


def shd(learned: Dag, truth: Dag, matching: typing.Sequence[int] | None = None) -> int:
    """Structural Hamming distance after relabeling the learned graph.

    Each unordered pair of variables whose edge differs counts once, so a
    reversed edge costs 1.

    Parameters
    ----------
    learned : `Dag`
        Learned graph over the latents.
    truth : `Dag`
        True graph over the factors.
    matching : `list` [`int`] or None, optional
        Latent matched to each factor. If None, the identity. (the default
        is None)

    Returns
    -------
    `int`
        Distance.

    Raises
    ------
    `ContractError`
        If the sizes differ or the matching is not a permutation.
    """

    if learned.n != truth.n:
        raise ContractError(f"Graph sizes differ: {learned.n} and {truth.n}.")

    matching = np.arange(truth.n) if matching is None else np.asarray(matching, dtype=np.int64)
    if sorted(matching.tolist()) != list(range(truth.n)):
        raise ContractError(f"{matching.tolist()} is not a permutation of {truth.n} variables.")

    permuted = learned.adjacency[np.ix_(matching, matching)]
    expected = truth.adjacency

    rows, columns = np.triu_indices(truth.n, k=1)
    differs = (permuted[rows, columns] != expected[rows, columns]) | (permuted[columns, rows] != expected[columns, rows])
    return int(differs.sum())
