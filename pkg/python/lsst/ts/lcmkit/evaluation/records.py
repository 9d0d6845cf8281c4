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

__all__ = ["MetricsRecord", "evaluate_representation"]

import typing
from dataclasses import asdict, dataclass

import numpy as np

from ..scm import Dag
from .metrics import dci, importance_matrix, intervention_accuracy, match_variables, shd


@dataclass
class MetricsRecord:
    """Flat record of the metrics of one run.

    A field is None when the method does not provide it, e.g. the accuracy
    of the beta-VAE.
    """

    dataset: str
    method: str
    seed: int
    D: float
    C: float
    I: float  # noqa: E741
    accuracy: float | None = None
    shd: int | None = None
    learned_adjacency: list[list[int]] | None = None
    shd_heuristic: int | None = None
    heuristic_adjacency: list[list[int]] | None = None

    def to_dict(self) -> dict[str, typing.Any]:
        return asdict(self)


def evaluate_representation(
    dataset: str,
    method: str,
    seed: int,
    latents: np.ndarray,
    factors: np.ndarray,
    truth: Dag,
    posteriors: typing.Any = None,
    true_targets: np.ndarray | None = None,
    learned: Dag | None = None,
    heuristic: Dag | None = None,
    workers: int = 1,
) -> MetricsRecord:
    """Compute the metrics of a learned representation.

    Parameters
    ----------
    dataset : `str`
        Dataset name.
    method : `str`
        Method name.
    seed : `int`
        Seed of the run. It also seeds the regressors.
    latents : `numpy.ndarray`
        Learned causal variables with the shape (N, n).
    factors : `numpy.ndarray`
        True causal variables with the shape (N, n).
    truth : `Dag`
        True graph.
    posteriors : `InterventionPosterior` or None, optional
        Intervention posteriors of the pairs. (the default is None)
    true_targets : `numpy.ndarray` or None, optional
        True targets of the pairs. (the default is None)
    learned : `Dag` or None, optional
        Graph from the interventional discovery or the graph search. (the
        default is None)
    heuristic : `Dag` or None, optional
        Graph from the heuristic. (the default is None)
    workers : `int`, optional
        Number of regressors fitted at the same time. (the default is 1)

    Returns
    -------
    `MetricsRecord`
        Record.
    """

    importance = importance_matrix(latents, factors, seed=seed, workers=workers)
    scores = dci(importance)
    matching = match_variables(importance)

    accuracy = None
    if posteriors is not None and true_targets is not None:
        accuracy = intervention_accuracy(posteriors, true_targets, truth.n)

    return MetricsRecord(
        dataset=dataset,
        method=method,
        seed=seed,
        D=scores.disentanglement,
        C=scores.completeness,
        I=scores.informativeness,
        accuracy=accuracy,
        shd=None if learned is None else shd(learned, truth, matching),
        learned_adjacency=None if learned is None else learned.to_list(),
        shd_heuristic=None if heuristic is None else shd(heuristic, truth, matching),
        heuristic_adjacency=None if heuristic is None else heuristic.to_list(),
    )
