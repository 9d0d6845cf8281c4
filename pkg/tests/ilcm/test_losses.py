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

import math
import typing

import numpy as np
import pytest
from lsst.ts.lcmkit import ContractError, DimensionError
from lsst.ts.lcmkit.datasets import build_toy2d
from lsst.ts.lcmkit.diffnum import Tensor, gradients
from lsst.ts.lcmkit.ilcm import (
    IlcmModel,
    TrainConfig,
    elbo_loss,
    encode_intervention,
    encode_project,
    prior_logdensity,
    target_masks,
)
from lsst.ts.lcmkit.scm import InterventionPrior, InterventionTarget, PairDataset, sample_weak_pairs
from scipy.integrate import quad
from scipy.stats import norm


@pytest.fixture
def model() -> IlcmModel:
    return IlcmModel(2, 2, np.random.default_rng(0), hidden=(8,), solution_hidden=(8,))


@pytest.fixture
def batch() -> PairDataset:
    scm, decoder = build_toy2d(0)
    return sample_weak_pairs(scm, decoder, 64, InterventionPrior.uniform(2), np.random.default_rng(1))


@pytest.fixture
def config() -> TrainConfig:
    return TrainConfig(steps=(1, 1, 1, 1), batch_size=16, hidden=(8,), solution_hidden=(8,))


def test_target_masks() -> None:
    masks = target_masks(3)

    assert masks.shape == (4, 3)
    assert not np.any(masks[0])
    assert np.array_equal(masks[1:], np.eye(3, dtype=bool))


def test_encode_project(model: IlcmModel, batch: PairDataset) -> None:
    e, e_tilde = encode_project(model, batch.x, batch.x_tilde, InterventionTarget.from_index(0), np.random.default_rng(2))

    assert e.shape == (64, 2)
    assert np.array_equal(e[:, 1], e_tilde[:, 1])
    assert not np.allclose(e[:, 0], e_tilde[:, 0])


def test_encode_project_empty(model: IlcmModel, batch: PairDataset) -> None:
    e, e_tilde = encode_project(model, batch.x, batch.x_tilde, -1, np.random.default_rng(2))

    assert np.array_equal(e, e_tilde)


def test_encode_project_weights(model: IlcmModel, batch: PairDataset) -> None:
    noise_rng = np.random.default_rng(3)
    noise = noise_rng.standard_normal((64, 2))
    noise_tilde = noise_rng.standard_normal((64, 2))
    e_pre = model.encode_mean(batch.x) + model.encode_std(batch.x) * noise
    e_tilde_pre = model.encode_mean(batch.x_tilde) + model.encode_std(batch.x_tilde) * noise_tilde

    first, _ = encode_project(model, batch.x, batch.x_tilde, 1, np.random.default_rng(3), lam=1.0)
    _, second = encode_project(model, batch.x, batch.x_tilde, 1, np.random.default_rng(3), lam=0.0)

    assert np.allclose(first[:, 0], e_pre[:, 0])
    assert np.allclose(second[:, 0], e_tilde_pre[:, 0])
    assert np.allclose(first[:, 1], e_pre[:, 1])
    assert np.allclose(second[:, 1], e_tilde_pre[:, 1])


def test_encode_project_per_pair_targets(model: IlcmModel, batch: PairDataset) -> None:
    targets = np.arange(64) % 3 - 1

    e, e_tilde = encode_project(model, batch.x, batch.x_tilde, targets, np.random.default_rng(4))

    masks = target_masks(2)[targets + 1]
    assert np.array_equal(e[~masks], e_tilde[~masks])


def test_encode_project_exception(model: IlcmModel, batch: PairDataset) -> None:
    with pytest.raises(ContractError):
        encode_project(
            model,
            batch.x,
            batch.x_tilde,
            InterventionTarget(frozenset({0, 1}), atomic=False),
            np.random.default_rng(0),
        )

    with pytest.raises(ContractError):
        encode_project(model, batch.x, batch.x_tilde, 2, np.random.default_rng(0))


def test_encode_intervention(model: IlcmModel, batch: PairDataset) -> None:
    posterior = encode_intervention(model, batch.x, batch.x_tilde)

    assert posterior.probs.shape == (64, 3)
    assert np.allclose(posterior.probs.sum(axis=1), 1.0)

    # Equal encodings give the uniform posterior, ties go to the empty target
    same = encode_intervention(model, batch.x, batch.x)
    assert np.allclose(same.probs, 1.0 / 3.0)
    assert np.all(same.most_likely() == -1)


def test_prior_logdensity_identity(model: IlcmModel) -> None:
    model.set_identity_solutions()
    e = np.array([0.3, -1.2])
    e_tilde = np.array([2.0, -1.2])

    value = prior_logdensity(model, e, e_tilde, 0)
    empty = prior_logdensity(model, e, e, -1)

    expected_empty = -math.log(3) + norm.logpdf(e).sum()
    assert isinstance(value, float)
    assert np.isclose(empty, expected_empty)
    assert np.isclose(value, expected_empty + norm.logpdf(2.0))


def test_prior_logdensity_uniform_solutions(model: IlcmModel) -> None:
    e = np.array([[0.3, -1.2], [0.1, 0.4]])
    e_tilde = np.array([[0.3, 0.7], [0.1, 0.4]])

    values = prior_logdensity(model, e, e_tilde, np.array([1, -1]), uniform_solutions=True)

    assert values.shape == (2,)
    assert np.allclose(values, -math.log(3) + norm.logpdf(e).sum(axis=1))


def test_prior_logdensity_normalized(model: IlcmModel) -> None:
    e = np.array([0.4, -0.6])

    # The solution is affine in e_tilde_1, so the density is a Gaussian
    shift = model.solution_forward(1, np.array([0.0]), e[None])[0]
    scale = model.solution_forward(1, np.array([1.0]), e[None])[0] - shift
    center = -shift / scale
    width = 12.0 / abs(scale)

    def density(value: float) -> float:
        e_tilde = np.array([e[0], value])
        return math.exp(prior_logdensity(model, e, e_tilde, 1))

    integral, _ = quad(density, center - width, center + width, points=[center], limit=200)

    # Integrating e_tilde_i out leaves p(e) p(I)
    assert np.isclose(integral, math.exp(-math.log(3) + norm.logpdf(e).sum()), rtol=1e-6)


def test_prior_logdensity_exception(model: IlcmModel) -> None:
    with pytest.raises(ContractError):
        prior_logdensity(model, np.array([0.0, 0.0]), np.array([1.0, 1.0]), 0)

    with pytest.raises(ContractError):
        prior_logdensity(model, np.array([0.0, 0.0]), np.array([0.0, 1.0]), -1)

    with pytest.raises(DimensionError):
        prior_logdensity(model, np.zeros(3), np.zeros(3), -1)


@pytest.mark.parametrize("phase", [1, 2, 3, 4])
def test_elbo_loss(model: IlcmModel, batch: PairDataset, config: TrainConfig, phase: int) -> None:
    loss, diagnostics = elbo_loss(model, batch, config, phase, np.random.default_rng(5))

    assert loss.shape == ()
    assert np.isfinite(loss.item())
    assert diagnostics["loss"] == loss.item()
    assert diagnostics["phase"] == phase
    assert np.isfinite(diagnostics["elbo"])
    if phase > 1:
        assert 0.0 <= diagnostics["entropy"] <= math.log(3) + 1e-9


def test_elbo_loss_deterministic(model: IlcmModel, batch: PairDataset, config: TrainConfig) -> None:
    first, _ = elbo_loss(model, batch, config, 3, np.random.default_rng(6))
    second, _ = elbo_loss(model, batch, config, 3, np.random.default_rng(6))

    assert first.item() == second.item()


def test_elbo_loss_exception(model: IlcmModel, batch: PairDataset, config: TrainConfig) -> None:
    with pytest.raises(ContractError):
        elbo_loss(model, batch, config, 5, np.random.default_rng(0))

    other = IlcmModel(2, 3, np.random.default_rng(0), hidden=(4,), solution_hidden=(4,))
    with pytest.raises(DimensionError):
        elbo_loss(other, batch, config, 1, np.random.default_rng(0))


def test_elbo_loss_intervention_gradient(model: IlcmModel, batch: PairDataset, config: TrainConfig) -> None:
    raw = model.intervention_raw
    raw.data[...] = [0.2, -0.3, 0.1]

    loss, _ = elbo_loss(model, batch, config, 2, np.random.default_rng(7))
    (grad,) = gradients(loss, [raw])

    step = 1e-5
    expected = np.zeros(3)
    for idx in range(3):
        original = raw.data[idx]
        raw.data[idx] = original + step
        upper = elbo_loss(model, batch, config, 2, np.random.default_rng(7))[0].item()
        raw.data[idx] = original - step
        lower = elbo_loss(model, batch, config, 2, np.random.default_rng(7))[0].item()
        raw.data[idx] = original
        expected[idx] = (upper - lower) / (2.0 * step)

    assert np.allclose(grad.data, expected, rtol=1e-4, atol=1e-5)


@pytest.mark.parametrize("phase", [1, 2, 3, 4])
def test_elbo_loss_parameter_gradients(
    model: IlcmModel,
    batch: PairDataset,
    config: TrainConfig,
    phase: int,
    check_parameter_gradients: typing.Callable[..., None],
) -> None:
    model.intervention_raw.data[...] = [0.2, -0.3, 0.1]

    def loss_fn() -> Tensor:
        return elbo_loss(model, batch[:8], config, phase, np.random.default_rng(9), beta=0.7)[0]

    check_parameter_gradients(loss_fn, model.parameters(), seed=phase)


def test_elbo_loss_phase1_ignores_interventions(model: IlcmModel, batch: PairDataset, config: TrainConfig) -> None:
    loss, _ = elbo_loss(model, batch, config, 1, np.random.default_rng(8))
    grads = gradients(loss, [model.intervention_raw] + model.solutions[0].parameters())

    assert all(not np.any(grad.data) for grad in grads)
