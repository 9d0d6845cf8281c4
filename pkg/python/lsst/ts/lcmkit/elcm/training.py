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
    "ElcmResult",
    "GraphSearchResult",
    "elcm_loss",
    "elcm_validation_loss",
    "train_elcm_fixed_graph",
    "infer_elcm_interventions",
    "exhaustive_graph_search",
]

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..constants import DIVERGENCE_THRESHOLD
from ..diffnum import (
    AdamState,
    LrSchedule,
    Tensor,
    adam_step,
    gaussian_logpdf,
    gradients,
    logsumexp,
    softmax,
    stack,
    standard_normal_logpdf,
)
from ..errors import ContractError, DimensionError, NumericalDivergenceError
from ..ilcm import InterventionPosterior
from ..scm import Dag, PairDataset, enumerate_dags
from ..utils import make_rng, run_in_workers_sync
from .config import ElcmTrainConfig
from .model import ElcmModel

log = logging.getLogger(__name__)

# Pairs of the training set used for the validation loss if there is no
# validation set
FALLBACK_VALIDATION_PAIRS = 1000


@dataclass
class ElcmResult:
    """Model trained on a fixed graph with its validation loss."""

    model: ElcmModel
    val_loss: float
    trace: list[dict[str, float]] = field(default_factory=list)


@dataclass
class GraphSearchResult:
    """Outcome of the exhaustive graph search.

    Attributes
    ----------
    dags : `list` [`Dag`]
        Enumerated graphs.
    losses : `list` [`float`]
        Validation loss of each graph.
    lambda_edges : `float`
        Weight of the edge count.
    selected : `Dag`
        Graph with the smallest penalized loss.
    results : `list` [`ElcmResult`]
        Trained model of each graph.
    """

    dags: list[Dag]
    losses: list[float]
    lambda_edges: float
    selected: Dag
    results: list[ElcmResult] = field(default_factory=list)

    @property
    def penalized_losses(self) -> list[float]:
        return [loss + self.lambda_edges * dag.edge_count() for loss, dag in zip(self.losses, self.dags)]

    @property
    def selected_index(self) -> int:
        return self.dags.index(self.selected)

    def to_dict(self) -> dict:
        return {
            "dags": [dag.to_list() for dag in self.dags],
            "losses": list(self.losses),
            "penalized_losses": self.penalized_losses,
            "lambda_edges": self.lambda_edges,
            "selected": self.selected.to_list(),
        }


def _target_elbos(
    model: ElcmModel,
    x: np.ndarray,
    x_tilde: np.ndarray,
    z: Tensor,
    z_tilde_pre: Tensor,
    mean: Tensor,
    std: Tensor,
    mean_tilde: Tensor,
    std_tilde: Tensor,
    beta: float,
) -> Tensor:
    """Lower bound of each atomic target with the shape (n + 1, N)."""

    noise, log_det = model.noise(z)
    log_pz = standard_normal_logpdf(noise).sum(axis=1) + log_det
    log_qz = gaussian_logpdf(z, mean, std).sum(axis=1)
    reco = gaussian_logpdf(x, model.decode(z), model.decoder_std).sum(axis=1)

    rows = list()
    for target in range(-1, model.n):
        if target < 0:
            z_tilde = z
            log_ratio = log_pz - log_qz
        else:
            value = z_tilde_pre[:, target]
            z_tilde = model.intervene(z, noise, target, value)
            log_ratio = (
                log_pz
                + standard_normal_logpdf(value)
                - log_qz
                - gaussian_logpdf(value, mean_tilde[:, target], std_tilde[:, target])
            )

        reco_tilde = gaussian_logpdf(x_tilde, model.decode(z_tilde), model.decoder_std).sum(axis=1)
        rows.append(reco + reco_tilde + beta * log_ratio)

    return stack(rows, axis=0)


def elcm_loss(
    model: ElcmModel,
    batch: PairDataset,
    rng: np.random.Generator,
    beta: float,
) -> tuple[Tensor, dict[str, float]]:
    """Negative lower bound of log p(x, x_tilde) marginalized over the atomic
    targets by explicit summation.

    Parameters
    ----------
    model : `ElcmModel`
        Model.
    batch : `PairDataset`
        Batch of pairs.
    rng : `numpy.random.Generator`
        Random number generator of the samples.
    beta : `float`
        Weight of the prior terms.

    Returns
    -------
    loss : `Tensor`
        Scalar loss.
    diagnostics : `dict`
        Loss of the batch.

    Raises
    ------
    `NumericalDivergenceError`
        If the loss is not finite.
    """

    if batch.data_dim != model.data_dim:
        raise DimensionError(f"Batch has {batch.data_dim} dimensions, the model expects {model.data_dim}.")

    num = len(batch)
    mean, std = model.encode(batch.x)
    mean_tilde, std_tilde = model.encode(batch.x_tilde)
    z = mean + std * rng.standard_normal((num, model.n))
    z_tilde_pre = mean_tilde + std_tilde * rng.standard_normal((num, model.n))

    elbos = _target_elbos(model, batch.x, batch.x_tilde, z, z_tilde_pre, mean, std, mean_tilde, std_tilde, beta)
    loss = -(logsumexp(elbos - math.log(model.n + 1), axis=0)).mean()

    if not np.isfinite(loss.data):
        raise NumericalDivergenceError("ELCM loss is not finite.", diagnostics={"loss": float(loss.data)})

    return loss, {"loss": float(loss.data), "beta": float(beta)}


def elcm_validation_loss(
    model: ElcmModel,
    dataset: PairDataset,
    config: ElcmTrainConfig,
    batch_size: int = 1000,
) -> float:
    """Mean loss per pair at the final beta with a fixed random stream."""

    if len(dataset) == 0:
        raise ContractError("Validation loss needs at least one pair.")

    total = 0.0
    for idx, batch in enumerate(dataset.iter_batches(batch_size)):
        rng = np.random.default_rng([config.seed, idx, 1])
        _, diagnostics = elcm_loss(model, batch, rng, config.beta_final)
        total += diagnostics["loss"] * len(batch)

    return total / len(dataset)


def train_elcm_fixed_graph(
    dag: Dag,
    dataset: PairDataset,
    config: ElcmTrainConfig,
    val_dataset: PairDataset | None = None,
) -> ElcmResult:
    """Train an ELCM whose prior factorizes over the graph.

    Parameters
    ----------
    dag : `Dag`
        Causal graph.
    dataset : `PairDataset`
        Training pairs.
    config : `ElcmTrainConfig`
        Training configuration.
    val_dataset : `PairDataset` or None, optional
        Validation pairs. If None, the first training pairs. (the default is
        None)

    Returns
    -------
    `ElcmResult`
        Model, validation loss, and loss trace.

    Raises
    ------
    `NumericalDivergenceError`
        If the loss is not finite or exceeds the divergence threshold.
    """

    model = ElcmModel(
        dag,
        dataset.data_dim,
        make_rng(config.seed),
        hidden=config.hidden,
        mechanism_hidden=config.mechanism_hidden,
        decoder_std=config.decoder_std,
    )

    params = model.parameters()
    adam = AdamState.create(params, config.initial_lr)
    schedule = LrSchedule(config.initial_lr, max(config.steps, 1))

    trace: list[dict[str, float]] = list()
    for step in range(config.steps):
        rng = np.random.default_rng([config.seed, step])
        batch = dataset.sample_batch(config.batch_size, rng)
        beta = config.beta_at(step)

        try:
            loss, diagnostics = elcm_loss(model, batch, rng, beta)
        except NumericalDivergenceError as error:
            error.diagnostics.update(step=step, dag=dag.to_list())
            error.trace = trace
            raise

        if diagnostics["loss"] > DIVERGENCE_THRESHOLD:
            raise NumericalDivergenceError(
                f"Loss {diagnostics['loss']:.3g} exceeds {DIVERGENCE_THRESHOLD:.0e} at step {step}.",
                diagnostics=dict(diagnostics, step=step, dag=dag.to_list()),
                trace=trace,
            )

        adam_step(adam, params, gradients(loss, params), schedule, step)
        trace.append({"step": step, "loss": diagnostics["loss"], "beta": beta, "lr": adam.learning_rate})

        if (step + 1) % config.log_interval == 0:
            log.info("Graph %s, step %d: loss %.4f.", dag.to_list(), step + 1, diagnostics["loss"])

    if val_dataset is None:
        val_dataset = dataset[:FALLBACK_VALIDATION_PAIRS]

    return ElcmResult(model=model, val_loss=elcm_validation_loss(model, val_dataset, config), trace=trace)


def infer_elcm_interventions(model: ElcmModel, x: np.ndarray, x_tilde: np.ndarray) -> InterventionPosterior:
    """Posterior over the atomic targets from the lower bound of each target
    at the encoder means.

    Parameters
    ----------
    model : `ElcmModel`
        Model.
    x : `numpy.ndarray`
        Data before the intervention with the shape (N, data_dim).
    x_tilde : `numpy.ndarray`
        Data after the intervention with the shape (N, data_dim).

    Returns
    -------
    `InterventionPosterior`
        Posterior with the shape (N, n + 1).
    """

    x = np.atleast_2d(x)
    x_tilde = np.atleast_2d(x_tilde)
    mean, std = model.encode(x)
    mean_tilde, std_tilde = model.encode(x_tilde)

    elbos = _target_elbos(model, x, x_tilde, mean, mean_tilde, mean, std, mean_tilde, std_tilde, 1.0)
    probs = softmax(elbos.T, axis=1).data
    return InterventionPosterior(probs / probs.sum(axis=1, keepdims=True))


def exhaustive_graph_search(
    dataset: PairDataset,
    n: int,
    config: ElcmTrainConfig,
    lambda_edges: float | None = None,
    val_dataset: PairDataset | None = None,
    workers: int = 1,
) -> GraphSearchResult:
    """Train one model per DAG and select the graph with the smallest
    validation loss plus lambda_edges times the number of edges.

    Every graph is trained with the same configuration and seed. Ties go to
    the graph enumerated first.

    Parameters
    ----------
    dataset : `PairDataset`
        Training pairs.
    n : `int`
        Number of causal variables.
    config : `ElcmTrainConfig`
        Training configuration.
    lambda_edges : `float` or None, optional
        Weight of the edge count. If None, 0.01 times the final beta. (the
        default is None)
    val_dataset : `PairDataset` or None, optional
        Validation pairs. (the default is None)
    workers : `int`, optional
        Number of graphs trained at the same time. (the default is 1)

    Returns
    -------
    `GraphSearchResult`
        Losses of all graphs and the selected graph.

    Raises
    ------
    `GraphSearchError`
        If n is too large for the enumeration.
    """

    dags = enumerate_dags(n)
    if lambda_edges is None:
        lambda_edges = 0.01 * config.beta_final

    log.info("Training %d graphs over %d variables.", len(dags), n)
    results = run_in_workers_sync(
        [lambda dag=dag: train_elcm_fixed_graph(dag, dataset, config, val_dataset=val_dataset) for dag in dags],
        workers=workers,
    )

    losses = [result.val_loss for result in results]
    penalized = [loss + lambda_edges * dag.edge_count() for loss, dag in zip(losses, dags)]
    selected = dags[int(np.argmin(penalized))]
    log.info("Selected the graph %s.", selected.to_list())

    return GraphSearchResult(
        dags=dags,
        losses=losses,
        lambda_edges=float(lambda_edges),
        selected=selected,
        results=results,
    )
