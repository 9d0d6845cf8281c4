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
    "encode_intervention",
    "encode_project",
    "prior_logdensity",
    "elbo_loss",
    "target_masks",
]

import math
import typing

import numpy as np

from ..diffnum import (
    Tensor,
    exp,
    gaussian_logpdf,
    log,
    stack,
    standard_normal_logpdf,
    where,
)
from ..errors import ContractError, DimensionError, NumericalDivergenceError
from ..scm import EMPTY_TARGET, InterventionTarget, PairDataset
from .config import TrainConfig
from .model import IlcmModel, InterventionPosterior

# Offset inside the log of the batch-aggregate posterior
ENTROPY_EPSILON = 1e-12


def target_masks(n: int) -> np.ndarray:
    """Masks of the n + 1 atomic targets with the shape (n + 1, n).

    The row 0 is the empty target and the row i + 1 is the target {i}.
    """
    return np.vstack([np.zeros((1, n), dtype=bool), np.eye(n, dtype=bool)])


def _target_indices(target: typing.Any, num: int, n: int) -> np.ndarray:
    if isinstance(target, InterventionTarget):
        indices = np.full(num, target.index)
    else:
        indices = np.broadcast_to(np.asarray(target, dtype=np.int64), (num,)).copy()

    if np.any(indices < EMPTY_TARGET) or np.any(indices >= n):
        raise ContractError(f"Targets should be in [-1, {n - 1}].")

    return indices


def encode_intervention(model: IlcmModel, x: np.ndarray, x_tilde: np.ndarray) -> InterventionPosterior:
    """Posterior over the atomic targets given the pairs.

    Parameters
    ----------
    model : `IlcmModel`
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

    mean = Tensor(model.encode_mean(np.atleast_2d(x)))
    mean_tilde = Tensor(model.encode_mean(np.atleast_2d(x_tilde)))
    log_probs = model.intervention_log_probs(mean, mean_tilde).data

    probs = np.exp(log_probs)
    return InterventionPosterior(probs / probs.sum(axis=1, keepdims=True))


def _project(
    e_pre: Tensor,
    e_tilde_pre: Tensor,
    mask: np.ndarray,
    lam: np.ndarray,
) -> tuple[Tensor, Tensor]:
    """Make the encodings equal outside of the target.

    The mask broadcasts against the encodings. Inside the target the
    preliminary encodings are kept, outside both become the average
    lam * e_pre + (1 - lam) * e_tilde_pre.
    """

    average = lam * e_pre + (1.0 - lam) * e_tilde_pre
    return where(mask, e_pre, average), where(mask, e_tilde_pre, average)


def encode_project(
    model: IlcmModel,
    x: np.ndarray,
    x_tilde: np.ndarray,
    target: InterventionTarget | int | np.ndarray,
    rng: np.random.Generator,
    lam: float | np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Sample the noise encodings and project them onto the pattern of the
    target.

    Parameters
    ----------
    model : `IlcmModel`
        Model.
    x : `numpy.ndarray`
        Data before the intervention with the shape (N, data_dim).
    x_tilde : `numpy.ndarray`
        Data after the intervention with the shape (N, data_dim).
    target : `InterventionTarget`, `int`, or `numpy.ndarray`
        Atomic target of all pairs, or the target index of each pair with -1
        for the empty target.
    rng : `numpy.random.Generator`
        Random number generator of the samples and the averaging weights.
    lam : `float`, `numpy.ndarray`, or None, optional
        Averaging weights. If None, drawn uniformly from [0, 1] per pair and
        coordinate. (the default is None)

    Returns
    -------
    e : `numpy.ndarray`
        Encoding of x with the shape (N, n).
    e_tilde : `numpy.ndarray`
        Encoding of x_tilde. Outside of the target, e_tilde == e exactly.

    Raises
    ------
    `ContractError`
        If the target is not atomic.
    """

    x = np.atleast_2d(x)
    x_tilde = np.atleast_2d(x_tilde)
    if isinstance(target, InterventionTarget) and not target.atomic:
        raise ContractError("Projection requires an atomic target.")

    num = len(x)
    indices = _target_indices(target, num, model.n)
    mask = target_masks(model.n)[indices + 1]

    e_pre = model.encode_mean(x) + model.encode_std(x) * rng.standard_normal((num, model.n))
    e_tilde_pre = model.encode_mean(x_tilde) + model.encode_std(x_tilde) * rng.standard_normal((num, model.n))

    if lam is None:
        lam = rng.uniform(0.0, 1.0, size=(num, model.n))
    lam = np.broadcast_to(np.asarray(lam, dtype=np.float64), (num, model.n))

    e, e_tilde = _project(Tensor(e_pre), Tensor(e_tilde_pre), mask, lam)
    return e.numpy(), e_tilde.numpy()


def _solution_log_density(model: IlcmModel, idx: int, e: Tensor, e_tilde_i: Tensor) -> Tensor:
    """log p(e_tilde_i | e) = log N(s_i(e_tilde_i; e)) + log |ds_i/de_tilde_i|."""

    value, log_det = model.solutions[idx].forward(e_tilde_i, e)
    return standard_normal_logpdf(value) + log_det


def prior_logdensity(
    model: IlcmModel,
    e: np.ndarray,
    e_tilde: np.ndarray,
    target: InterventionTarget | int | np.ndarray,
    uniform_solutions: bool = False,
) -> float | np.ndarray:
    """Log-density of the implicit prior p(e, e_tilde_I, I).

    The terms are log p(I) with the uniform p(I), the standard Gaussian
    log p(e), and for each intervened i the change of variables through the
    solution function with the standard Gaussian intervention density. The
    delta factors of the coordinates outside of the target contribute 0.

    Parameters
    ----------
    model : `IlcmModel`
        Model.
    e : `numpy.ndarray`
        Encodings before the intervention with the shape (n,) or (N, n).
    e_tilde : `numpy.ndarray`
        Encodings after the intervention.
    target : `InterventionTarget`, `int`, or `numpy.ndarray`
        Atomic target, or the target index of each row.
    uniform_solutions : `bool`, optional
        Replace the solution terms by the uniform density 0 of the phase 2
        prior. (the default is False)

    Returns
    -------
    `float` or `numpy.ndarray`
        Log-density, a float for a single row.

    Raises
    ------
    `ContractError`
        If e and e_tilde differ outside of the target.
    """

    e = np.asarray(e, dtype=np.float64)
    is_single = e.ndim == 1
    e = np.atleast_2d(e)
    e_tilde = np.atleast_2d(np.asarray(e_tilde, dtype=np.float64))
    if e.shape != e_tilde.shape or e.shape[1] != model.n:
        raise DimensionError(f"Encodings should have the shape (N, {model.n}), got {e.shape} and {e_tilde.shape}.")

    indices = _target_indices(target, len(e), model.n)
    mask = target_masks(model.n)[indices + 1]
    if np.any(e[~mask] != e_tilde[~mask]):
        raise ContractError("Encodings differ outside of the intervention target.")

    total = -math.log(model.n + 1) + standard_normal_logpdf(e).data.sum(axis=1)
    if not uniform_solutions:
        e_tensor = Tensor(e)
        for idx in range(model.n):
            rows = np.flatnonzero(indices == idx)
            if len(rows) == 0:
                continue
            term = _solution_log_density(model, idx, e_tensor[rows], Tensor(e_tilde[rows, idx]))
            total[rows] += term.data

    return float(total[0]) if is_single else total


def _reconstruction(model: IlcmModel, x: np.ndarray, e: Tensor) -> Tensor:
    """Sum of log p(x|e) over the data dimensions."""
    return gaussian_logpdf(x, model.decode(e), model.decoder_std).sum(axis=-1)


def elbo_loss(
    model: IlcmModel,
    batch: PairDataset,
    config: TrainConfig,
    phase: int,
    rng: np.random.Generator,
    beta: float | None = None,
) -> tuple[Tensor, dict[str, float]]:
    """Training loss of one batch.

    Phase 1 is the beta-VAE loss with the standard Gaussian prior on both
    encodings. Phases 2 to 4 sum the lower bound over the n + 1 atomic
    targets weighted by the intervention posterior; phase 2 models
    p(e_tilde_i|e) with a uniform density, phases 3 and 4 use the solution
    functions, and phase 4 uses the most likely target only. The
    reconstruction regularizer (weight alpha) and the negative entropy of the
    batch-aggregate posterior (weight gamma) are added in phases 2 to 4.

    Parameters
    ----------
    model : `IlcmModel`
        Model.
    batch : `PairDataset`
        Batch of pairs.
    config : `TrainConfig`
        Training configuration.
    phase : `int`
        Training phase, 1 to 4.
    rng : `numpy.random.Generator`
        Random number generator of the samples.
    beta : `float` or None, optional
        Weight of the prior terms. If None, config.beta_final. (the default
        is None)

    Returns
    -------
    loss : `Tensor`
        Scalar loss.
    diagnostics : `dict`
        Mean lower bound, reconstruction, and entropy of the batch.

    Raises
    ------
    `ContractError`
        If the phase is not 1 to 4.
    `NumericalDivergenceError`
        If the loss is not finite.
    """

    if phase not in (1, 2, 3, 4):
        raise ContractError(f"Phase should be 1, 2, 3, or 4, got {phase}.")

    if batch.data_dim != model.data_dim:
        raise DimensionError(f"Batch has {batch.data_dim} dimensions, the model expects {model.data_dim}.")

    beta = config.beta_final if beta is None else beta
    num = len(batch)
    n = model.n

    mean, std = model.encode(batch.x)
    mean_tilde, std_tilde = model.encode(batch.x_tilde)
    e_pre = mean + std * rng.standard_normal((num, n))
    e_tilde_pre = mean_tilde + std_tilde * rng.standard_normal((num, n))
    lam = rng.uniform(0.0, 1.0, size=(num, n))

    reco_pre = _reconstruction(model, batch.x, e_pre) + _reconstruction(model, batch.x_tilde, e_tilde_pre)
    diagnostics = {"phase": float(phase), "beta": float(beta), "reconstruction": float(reco_pre.data.mean())}

    if phase == 1:
        kl_terms = (
            standard_normal_logpdf(e_pre)
            + standard_normal_logpdf(e_tilde_pre)
            - gaussian_logpdf(e_pre, mean, std)
            - gaussian_logpdf(e_tilde_pre, mean_tilde, std_tilde)
        ).sum(axis=1)
        elbo = reco_pre + beta * kl_terms
        loss = -elbo.mean()
        diagnostics["elbo"] = float(elbo.data.mean())
        return _checked(loss, diagnostics), diagnostics

    masks = target_masks(n)
    num_targets = n + 1
    e_all, e_tilde_all = _project(e_pre, e_tilde_pre, masks[:, None, :], lam)

    reco = _reconstruction(model, batch.x, e_all) + _reconstruction(model, batch.x_tilde, e_tilde_all)
    log_prior = -math.log(num_targets) + standard_normal_logpdf(e_all).sum(axis=-1)
    log_posterior = gaussian_logpdf(e_all, mean, std).sum(axis=-1) + (
        gaussian_logpdf(e_tilde_all, mean_tilde, std_tilde) * masks[:, None, :]
    ).sum(axis=-1)

    if phase >= 3:
        rows = [Tensor(np.zeros(num))]
        for idx in range(n):
            rows.append(_solution_log_density(model, idx, e_all[idx + 1], e_tilde_all[idx + 1][:, idx]))
        log_prior = log_prior + stack(rows, axis=0)

    elbo_targets = reco + beta * (log_prior - log_posterior)

    log_q = model.intervention_log_probs(mean, mean_tilde)
    q = exp(log_q)
    if phase == 4:
        weights = np.zeros((num, num_targets))
        weights[np.arange(num), np.argmax(log_q.data, axis=1)] = 1.0
        elbo = (Tensor(weights.T) * elbo_targets).sum(axis=0)
    else:
        elbo = (q.T * (elbo_targets - beta * log_q.T)).sum(axis=0)

    q_batch = q.mean(axis=0)
    entropy = -(q_batch * log(q_batch + ENTROPY_EPSILON)).sum()

    loss = -elbo.mean() - config.alpha * reco_pre.mean() - config.gamma * entropy

    diagnostics["elbo"] = float(elbo.data.mean())
    diagnostics["entropy"] = float(entropy.data)
    return _checked(loss, diagnostics), diagnostics


def _checked(loss: Tensor, diagnostics: dict[str, float]) -> Tensor:
    if not np.isfinite(loss.data):
        raise NumericalDivergenceError(
            f"Loss is not finite in phase {int(diagnostics['phase'])}.",
            diagnostics=dict(diagnostics, loss=float(loss.data)),
        )

    diagnostics["loss"] = float(loss.data)
    return loss
