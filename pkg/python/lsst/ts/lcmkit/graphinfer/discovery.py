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

__all__ = ["AncestorTest", "ancestor_tests", "discover_interventional"]

import logging
from dataclasses import dataclass

import networkx as nx
import numpy as np
from scipy.stats import norm
from sklearn.linear_model import LinearRegression

from ..constants import MIN_DISCOVERY_SAMPLES
from ..errors import DimensionError, InsufficientDataError
from ..scm import EMPTY_TARGET, Dag

log = logging.getLogger(__name__)

# Smallest increase of the mean squared shift, relative to the variance of
# the affected variable, that counts as an effect
EFFECT_THRESHOLD = 0.01


@dataclass(frozen=True)
class AncestorTest:
    """One-sided test of "intervening on i shifts z_j".

    Attributes
    ----------
    source : `int`
        Intervened variable i.
    target : `int`
        Tested variable j.
    statistic : `float`
        z statistic of the mean squared shift against the empty target.
    p_value : `float`
        One-sided p-value.
    effect : `float`
        Increase of the mean squared shift relative to the variance of z_j.
    significant : `bool`
        Result after the Bonferroni correction and the effect guard.
    """

    source: int
    target: int
    statistic: float
    p_value: float
    effect: float
    significant: bool


def _check_inputs(z: np.ndarray, z_tilde: np.ndarray, targets: np.ndarray, min_samples: int) -> None:
    if z.ndim != 2 or z.shape != z_tilde.shape:
        raise DimensionError(f"Shapes of z {z.shape} and z_tilde {z_tilde.shape} differ.")

    if targets.shape != (len(z),):
        raise DimensionError(f"Expected {len(z)} targets, got the shape {targets.shape}.")

    counts = np.bincount(targets + 1, minlength=z.shape[1] + 1)
    if counts.min() < min_samples:
        raise InsufficientDataError(
            f"Each target needs {min_samples} pairs, the smallest count is {counts.min()}."
        )


def ancestor_tests(
    z: np.ndarray,
    z_tilde: np.ndarray,
    targets: np.ndarray,
    alpha: float = 0.01,
) -> list[AncestorTest]:
    """Test every ordered pair of variables for an interventional effect.

    The squared shift (z_tilde_j - z_j)^2 of the pairs intervened on i is
    compared with that of the pairs without an intervention by a one-sided
    z-test. The level is Bonferroni corrected over the n (n - 1) tests.

    Parameters
    ----------
    z : `numpy.ndarray`
        Causal variables before the intervention with the shape (N, n).
    z_tilde : `numpy.ndarray`
        Causal variables after the intervention with the shape (N, n).
    targets : `numpy.ndarray`
        Target index of each pair, -1 for the empty target.
    alpha : `float`, optional
        Family-wise significance level. (the default is 0.01)

    Returns
    -------
    `list` [`AncestorTest`]
        Tests in the row-major order of (i, j), i != j.
    """

    n = z.shape[1]
    shift = (z_tilde - z) ** 2
    variances = np.var(z, axis=0)
    level = alpha / max(n * (n - 1), 1)

    reference = shift[targets == EMPTY_TARGET]
    tests = list()
    for source in range(n):
        intervened = shift[targets == source]
        for target in range(n):
            if source == target:
                continue

            sample = intervened[:, target]
            base = reference[:, target]
            difference = sample.mean() - base.mean()
            scale = np.sqrt(sample.var(ddof=1) / len(sample) + base.var(ddof=1) / len(base))

            if scale > 0.0:
                statistic = difference / scale
                p_value = float(norm.sf(statistic))
            else:
                statistic = np.inf if difference > 0.0 else 0.0
                p_value = 0.0 if difference > 0.0 else 1.0

            effect = difference / variances[target] if variances[target] > 0.0 else 0.0
            tests.append(
                AncestorTest(
                    source=source,
                    target=target,
                    statistic=float(statistic),
                    p_value=p_value,
                    effect=float(effect),
                    significant=bool(p_value < level and effect >= EFFECT_THRESHOLD),
                )
            )

    return tests


def _ancestor_closure(n: int, tests: list[AncestorTest]) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(n))
    for test in tests:
        if test.significant:
            graph.add_edge(test.source, test.target, weight=test.statistic)

    while not nx.is_directed_acyclic_graph(graph):
        cycle = nx.find_cycle(graph)
        weakest = min(cycle, key=lambda edge: graph.edges[edge[0], edge[1]]["weight"])
        log.info("Dropping the ancestor relation %d -> %d to break a cycle.", weakest[0], weakest[1])
        graph.remove_edge(weakest[0], weakest[1])

    return nx.transitive_closure_dag(graph)


def discover_interventional(
    z: np.ndarray,
    z_tilde: np.ndarray,
    targets: np.ndarray,
    alpha: float = 0.01,
    min_samples: int = MIN_DISCOVERY_SAMPLES,
    coef_threshold: float = 0.05,
) -> Dag:
    """Causal graph from the causal variables and the intervention targets
    of the pairs.

    The ancestor relation comes from `ancestor_tests`, made acyclic by
    dropping the weakest relation of each cycle and closed transitively.
    Each variable is then regressed on its ancestors over the pairs that do
    not intervene on it, and the ancestors with a standardized coefficient
    of magnitude below the threshold are dropped.

    Parameters
    ----------
    z : `numpy.ndarray`
        Causal variables before the intervention with the shape (N, n).
    z_tilde : `numpy.ndarray`
        Causal variables after the intervention with the shape (N, n).
    targets : `numpy.ndarray`
        Target index of each pair, -1 for the empty target.
    alpha : `float`, optional
        Family-wise significance level. (the default is 0.01)
    min_samples : `int`, optional
        Smallest number of pairs of each target. (the default is 100)
    coef_threshold : `float`, optional
        Smallest standardized regression coefficient of a parent. (the
        default is 0.05)

    Returns
    -------
    `Dag`
        Graph.

    Raises
    ------
    `InsufficientDataError`
        If a target has fewer than min_samples pairs.
    """

    z = np.asarray(z, dtype=np.float64)
    z_tilde = np.asarray(z_tilde, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.int64)
    _check_inputs(z, z_tilde, targets, min_samples)

    n = z.shape[1]
    closure = _ancestor_closure(n, ancestor_tests(z, z_tilde, targets, alpha=alpha))

    adjacency = np.zeros((n, n), dtype=bool)
    for node in range(n):
        candidates = sorted(closure.predecessors(node))
        if not candidates:
            continue

        rows = targets != node
        inputs = z_tilde[rows][:, candidates]
        output = z_tilde[rows, node]

        output_std = output.std()
        if output_std == 0.0:
            continue

        fit = LinearRegression().fit(inputs, output)
        standardized = np.abs(fit.coef_) * inputs.std(axis=0) / output_std
        for candidate, value in zip(candidates, standardized):
            adjacency[candidate, node] = value >= coef_threshold

    return Dag(adjacency)
