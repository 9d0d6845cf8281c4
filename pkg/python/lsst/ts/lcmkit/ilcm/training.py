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
    "TrainResult",
    "create_model",
    "train",
    "validation_loss",
    "infer_topological_order",
    "latents_to_causal",
    "latent_traversal",
]

import logging
import typing
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from ..constants import DIVERGENCE_THRESHOLD
from ..diffnum import AdamState, LrSchedule, adam_step, gradients
from ..errors import DimensionError, NumericalDivergenceError
from ..graphinfer import ancestry_scores, encoding_medians, topological_order
from ..scm import PairDataset
from ..utils import make_rng
from .config import TrainConfig
from .losses import elbo_loss
from .model import IlcmModel, dvae_variant

log = logging.getLogger(__name__)

# Pairs used to infer the topological order before phase 4
ORDER_INFERENCE_PAIRS = 5000


@dataclass
class TrainResult:
    """Outcome of a training run.

    Attributes
    ----------
    model : `IlcmModel`
        Trained model.
    trace : `list` [`dict`]
        One record per step with the step, phase, loss, beta, and learning
        rate.
    step : `int`
        Global step count after the run.
    optimizer_state : `dict` [`str`, `numpy.ndarray`]
        State of the optimizer for resuming.
    """

    model: IlcmModel
    trace: list[dict[str, float]] = field(default_factory=list)
    step: int = 0
    optimizer_state: dict[str, np.ndarray] = field(default_factory=dict)

    def trace_frame(self) -> pd.DataFrame:
        """Loss trace as a data frame."""
        return pd.DataFrame(self.trace, columns=["step", "phase", "loss", "beta", "lr"])


def create_model(n: int, data_dim: int, config: TrainConfig, trivial_graph: bool = False) -> IlcmModel:
    """Create the model described by the configuration.

    Parameters
    ----------
    n : `int`
        Number of causal variables.
    data_dim : `int`
        Number of data dimensions.
    config : `TrainConfig`
        Training configuration, which provides the widths and the seed.
    trivial_graph : `bool`, optional
        Create the disentangled VAE baseline. (the default is False)

    Returns
    -------
    `IlcmModel`
        Model.
    """

    kwargs = dict(hidden=config.hidden, solution_hidden=config.solution_hidden, decoder_std=config.decoder_std)
    rng = make_rng(config.seed)
    if trivial_graph:
        return dvae_variant(n, data_dim, rng, **kwargs)

    return IlcmModel(n, data_dim, rng, **kwargs)


def infer_topological_order(model: IlcmModel, dataset: PairDataset) -> list[int]:
    """Infer the topological order from the ancestry scores of the solution
    functions.

    Parameters
    ----------
    model : `IlcmModel`
        Model.
    dataset : `PairDataset`
        Pairs. The first pairs serve as the data of the heuristic.

    Returns
    -------
    `list` [`int`]
        Order of the variables.
    """

    subset = dataset[:ORDER_INFERENCE_PAIRS]
    x = np.concatenate([subset.x, subset.x_tilde])
    scores = ancestry_scores(model, x, baseline=encoding_medians(model, x))
    return topological_order(scores)


def _make_schedule(config: TrainConfig) -> LrSchedule:
    boundaries = config.phase_boundaries
    restarts = sorted({first for first in boundaries[2:] if 0 < first < config.total_steps})
    return LrSchedule(config.initial_lr, config.total_steps, restart_steps=tuple(restarts))


def train(
    model: IlcmModel,
    dataset: PairDataset,
    config: TrainConfig,
    start_step: int = 0,
    optimizer_state: dict[str, np.ndarray] | None = None,
) -> TrainResult:
    """Train the model through the four phases.

    The phases are the beta-VAE pretraining, the training with the uniform
    intervention density, the training with the solution functions, and the
    fine-tuning with the topological order and the deterministic
    intervention encoder. The learning rate restarts at phases 3 and 4.

    Parameters
    ----------
    model : `IlcmModel`
        Model, trained in place.
    dataset : `PairDataset`
        Training pairs.
    config : `TrainConfig`
        Training configuration.
    start_step : `int`, optional
        Global step to resume from. (the default is 0)
    optimizer_state : `dict` or None, optional
        Optimizer state to resume from. (the default is None)

    Returns
    -------
    `TrainResult`
        Trained model and the loss trace.

    Raises
    ------
    `NumericalDivergenceError`
        If the loss is not finite or exceeds the divergence threshold. The
        error carries the trace up to the failure.
    """

    if dataset.data_dim != model.data_dim:
        raise DimensionError(f"Dataset has {dataset.data_dim} dimensions, the model expects {model.data_dim}.")

    params = model.parameters()
    adam = AdamState.create(params, config.initial_lr)
    if optimizer_state:
        adam.load_state_dict(optimizer_state)

    schedule = _make_schedule(config)
    trace: list[dict[str, float]] = list()

    current_phase = 0
    for step in range(start_step, config.total_steps):
        phase = config.phase_at(step)
        if phase != current_phase:
            log.info("Phase %d starts at step %d.", phase, step)
            current_phase = phase

            if (
                phase == 4
                and config.fix_topological_order
                and not model.trivial_graph
                and model.topological_order is None
            ):
                order = infer_topological_order(model, dataset)
                model.set_topological_order(order)
                log.info("Fixed the topological order %s.", order)

        rng = np.random.default_rng([config.seed, step])
        batch = dataset.sample_batch(config.batch_size, rng)
        beta = config.beta_at(step)

        try:
            loss, diagnostics = elbo_loss(model, batch, config, phase, rng, beta=beta)
        except NumericalDivergenceError as error:
            error.diagnostics.update(step=step)
            error.trace = trace
            raise

        if diagnostics["loss"] > DIVERGENCE_THRESHOLD:
            raise NumericalDivergenceError(
                f"Loss {diagnostics['loss']:.3g} exceeds {DIVERGENCE_THRESHOLD:.0e} at step {step}.",
                diagnostics=dict(diagnostics, step=step),
                trace=trace,
            )

        grads = gradients(loss, params)
        try:
            adam_step(adam, params, grads, schedule, step)
        except NumericalDivergenceError as error:
            error.trace = trace
            raise

        trace.append(
            {
                "step": step,
                "phase": phase,
                "loss": diagnostics["loss"],
                "beta": beta,
                "lr": adam.learning_rate,
            }
        )

        if (step + 1) % config.log_interval == 0:
            log.info("Step %d, phase %d: loss %.4f, lr %.2e.", step + 1, phase, diagnostics["loss"], adam.learning_rate)

    return TrainResult(
        model=model,
        trace=trace,
        step=max(start_step, config.total_steps),
        optimizer_state=adam.state_dict(),
    )


def validation_loss(
    model: IlcmModel,
    dataset: PairDataset,
    config: TrainConfig,
    phase: int | None = None,
    batch_size: int = 1000,
) -> float:
    """Mean loss over the pairs with a fixed random stream.

    Parameters
    ----------
    model : `IlcmModel`
        Model.
    dataset : `PairDataset`
        Validation pairs.
    config : `TrainConfig`
        Training configuration.
    phase : `int` or None, optional
        Phase of the loss. If None, the last phase of the configuration.
        (the default is None)
    batch_size : `int`, optional
        Batch size. (the default is 1000)

    Returns
    -------
    `float`
        Mean loss per pair.
    """

    if phase is None:
        phase = config.phase_at(max(config.total_steps - 1, 0))

    total = 0.0
    for idx, batch in enumerate(dataset.iter_batches(batch_size)):
        rng = np.random.default_rng([config.seed, idx, 1])
        _, diagnostics = elbo_loss(model, batch, config, phase, rng)
        total += diagnostics["loss"] * len(batch)

    return total / max(len(dataset), 1)


def latents_to_causal(model: IlcmModel, x: np.ndarray) -> np.ndarray:
    """Causal variables z_i = s_i(mu_e(x)_i; mu_e(x)).

    Parameters
    ----------
    model : `IlcmModel`
        Model.
    x : `numpy.ndarray`
        Data with the shape (N, data_dim).

    Returns
    -------
    `numpy.ndarray`
        Causal variables with the shape (N, n).
    """

    e = model.encode_mean(np.atleast_2d(x))
    return np.stack([model.solution_forward(idx, e[:, idx], e) for idx in range(model.n)], axis=1)


def latent_traversal(
    model: typing.Any,
    num_points: int = 21,
    limit: float = 2.0,
    base: np.ndarray | None = None,
) -> pd.DataFrame:
    """Decode a grid along each latent direction.

    Parameters
    ----------
    model : `IlcmModel` or `ElcmModel`
        Model with the attributes n and data_dim and the method
        decode_mean().
    num_points : `int`, optional
        Points per latent. (the default is 21)
    limit : `float`, optional
        The grid covers [-limit, limit]. (the default is 2.0)
    base : `numpy.ndarray` or None, optional
        Latent vector the traversal starts from. If None, zeros. (the
        default is None)

    Returns
    -------
    `pandas.DataFrame`
        Columns "latent", "value", and "x0" to "x{data_dim - 1}".
    """

    base = np.zeros(model.n) if base is None else np.asarray(base, dtype=np.float64)
    grid = np.linspace(-limit, limit, num_points)

    frames = list()
    for idx in range(model.n):
        latents = np.tile(base, (num_points, 1))
        latents[:, idx] = grid
        decoded = model.decode_mean(latents)

        frame = pd.DataFrame(decoded, columns=[f"x{dim}" for dim in range(model.data_dim)])
        frame.insert(0, "value", grid)
        frame.insert(0, "latent", idx)
        frames.append(frame)

    return pd.concat(frames, ignore_index=True)
