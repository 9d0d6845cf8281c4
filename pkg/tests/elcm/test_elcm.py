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
from pathlib import Path

import numpy as np
import pytest
from lsst.ts.lcmkit import (
    ConfigError,
    ContractError,
    DatasetFormatError,
    DimensionError,
    FormatErrorCode,
    GraphSearchError,
)
from lsst.ts.lcmkit.container import write_container
from lsst.ts.lcmkit.datasets import build_toy2d
from lsst.ts.lcmkit.diffnum import Mlp, Tensor
from lsst.ts.lcmkit.elcm import (
    ElcmModel,
    ElcmTrainConfig,
    elcm_loss,
    elcm_prior_logdensity,
    exhaustive_graph_search,
    infer_elcm_interventions,
    load_elcm_checkpoint,
    save_elcm_checkpoint,
    train_elcm_fixed_graph,
)
from lsst.ts.lcmkit.scm import Dag, InterventionPrior, InterventionTarget, PairDataset, sample_weak_pairs
from scipy.integrate import simpson
from scipy.stats import multivariate_normal, norm


@pytest.fixture
def dataset() -> PairDataset:
    scm, decoder = build_toy2d(0)
    return sample_weak_pairs(scm, decoder, 120, InterventionPrior.uniform(2), np.random.default_rng(0))


@pytest.fixture
def config() -> ElcmTrainConfig:
    return ElcmTrainConfig(steps=3, batch_size=16, hidden=(4,), mechanism_hidden=(4,), log_interval=2)


@pytest.fixture
def model() -> ElcmModel:
    return ElcmModel(Dag.chain(2), 2, np.random.default_rng(0), hidden=(4,), mechanism_hidden=(4,))


def test_config() -> None:
    config = ElcmTrainConfig()

    assert config.steps == 10000
    assert config.with_full_scale().steps == 30000
    assert config.beta_at(0) == 0.0
    assert config.beta_at(1500) == pytest.approx(0.5)
    assert config.beta_at(5000) == 1.0
    assert ElcmTrainConfig.from_dict(config.to_dict()) == config


def test_config_exception() -> None:
    with pytest.raises(ConfigError):
        ElcmTrainConfig(steps=-1)

    with pytest.raises(ConfigError):
        ElcmTrainConfig(initial_lr=0.0)

    with pytest.raises(ConfigError):
        ElcmTrainConfig.from_dict({"phases": 4})


def test_model_init_exception() -> None:
    with pytest.raises(DimensionError):
        ElcmModel(Dag.chain(2), 0, np.random.default_rng(0))

    with pytest.raises(ContractError):
        ElcmModel(Dag.chain(2), 2, np.random.default_rng(0), hidden=(4,), decoder_std=-1.0)


def test_noise(model: ElcmModel) -> None:
    z = np.random.default_rng(1).standard_normal((10, 2))

    noise, log_det = model.noise(z)
    rebuilt = model.intervene(z, noise, 0, z[:, 0])

    assert noise.shape == (10, 2)
    assert log_det.shape == (10,)
    assert np.allclose(rebuilt.data, z)
    assert np.allclose(model.log_prob(z).data, norm.logpdf(noise.data).sum(axis=1) + log_det.data)


def test_intervene(model: ElcmModel) -> None:
    z = np.random.default_rng(2).standard_normal((10, 2))
    noise, _ = model.noise(z)
    value = np.full(10, 1.5)

    z_tilde = model.intervene(z, noise, 0, value)
    noise_tilde, _ = model.noise(z_tilde)

    assert np.array_equal(z_tilde.data[:, 0], value)
    assert np.allclose(noise_tilde.data[:, 1], noise.data[:, 1])
    assert np.array_equal(model.intervene(z, noise, -1, value).data, z)


def test_prior_logdensity_identity(model: ElcmModel) -> None:
    for mechanism in model.mechanisms:
        mechanism.set_identity()

    z = np.array([0.3, -0.8])
    z_tilde = np.array([1.1, -0.8])

    value = elcm_prior_logdensity(model, z, z_tilde, InterventionTarget.from_index(0))

    assert isinstance(value, float)
    assert math.isclose(value, norm.logpdf(z).sum() + norm.logpdf(1.1))
    assert math.isclose(elcm_prior_logdensity(model, z, z, -1), norm.logpdf(z).sum())


def test_prior_logdensity_consistent(model: ElcmModel) -> None:
    z = np.random.default_rng(3).standard_normal((5, 2))
    noise, _ = model.noise(z)
    z_tilde = model.intervene(z, noise, 0, np.zeros(5)).data

    values = elcm_prior_logdensity(model, z, z_tilde, 0)

    assert values.shape == (5,)
    assert np.allclose(values, model.log_prob(z).data + norm.logpdf(0.0))


def test_prior_logdensity_exception(model: ElcmModel) -> None:
    for mechanism in model.mechanisms:
        mechanism.set_identity()

    z = np.array([0.3, -0.8])

    with pytest.raises(ContractError):
        elcm_prior_logdensity(model, z, np.array([1.1, 0.5]), 0)

    with pytest.raises(ContractError):
        elcm_prior_logdensity(model, z, np.array([1.1, -0.8]), -1)

    with pytest.raises(ContractError):
        elcm_prior_logdensity(model, z, z, InterventionTarget(frozenset({0, 1}), atomic=False))

    with pytest.raises(ContractError):
        elcm_prior_logdensity(model, z, z, 2)

    with pytest.raises(DimensionError):
        elcm_prior_logdensity(model, np.zeros(3), np.zeros(3), -1)


def test_elcm_loss(model: ElcmModel, dataset: PairDataset) -> None:
    loss, diagnostics = elcm_loss(model, dataset[:32], np.random.default_rng(4), 1.0)

    assert loss.shape == ()
    assert np.isfinite(loss.item())
    assert diagnostics == {"loss": loss.item(), "beta": 1.0}

    with pytest.raises(DimensionError):
        elcm_loss(model, PairDataset(np.zeros((4, 3)), np.zeros((4, 3))), np.random.default_rng(0), 1.0)


def test_elcm_loss_parameter_gradients(
    model: ElcmModel,
    dataset: PairDataset,
    check_parameter_gradients: typing.Callable[..., None],
) -> None:
    def loss_fn() -> Tensor:
        return elcm_loss(model, dataset[:8], np.random.default_rng(5), 0.7)[0]

    check_parameter_gradients(loss_fn, model.parameters())


def set_network(net: Mlp, weight: list[float], bias: list[float], output: list[float], offset: float) -> None:
    """Set a network with one hidden layer of four units and one input."""
    net.weights[0].data[0] = weight
    net.biases[0].data[...] = bias
    net.weights[1].data[:, 0] = output
    net.biases[1].data[...] = offset


def test_prior_normalized(model: ElcmModel) -> None:
    root, child = model.mechanisms
    root.set_identity()
    root.scale_net.biases[-1].data[...] = math.log(0.9)
    root.shift_net.biases[-1].data[...] = 0.2

    # Piecewise linear log-scale and shift with kinks at z_0 = 0 and 1
    set_network(child.scale_net, [1.0, -1.0, 1.0, 0.0], [0.0, 0.0, -1.0, 0.0], [0.3, 0.2, -0.4, 0.0], 0.0)
    set_network(child.shift_net, [1.0, -1.0, 1.0, 0.0], [0.0, 0.0, -1.0, 0.0], [0.6, -0.4, 0.3, 0.0], 0.1)

    grid = np.linspace(-8.0, 8.0, 641)
    z0, z1 = np.meshgrid(grid, grid, indexing="ij")
    points = np.stack([z0.ravel(), z1.ravel()], axis=1)

    density = np.exp(model.log_prob(points).data).reshape(z0.shape)

    assert simpson(simpson(density, x=grid, axis=1), x=grid) == pytest.approx(1.0, abs=1e-4)


def test_prior_chain_gaussian(model: ElcmModel) -> None:
    # z_0 ~ N(0.3, 1.2^2) and z_1 = 0.8 z_0 + 0.5 + 0.6 eps_1
    root, child = model.mechanisms
    root.set_identity()
    root.scale_net.biases[-1].data[...] = math.log(1.2)
    root.shift_net.biases[-1].data[...] = 0.3

    child.set_identity()
    child.scale_net.biases[-1].data[...] = math.log(0.6)
    set_network(child.shift_net, [1.0, -1.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0], [0.8, -0.8, 0.0, 0.0], 0.5)

    mean = np.array([0.3, 0.8 * 0.3 + 0.5])
    cov = np.array([[1.44, 0.8 * 1.44], [0.8 * 1.44, 0.64 * 1.44 + 0.36]])
    z = np.random.default_rng(6).multivariate_normal(mean, cov, size=50)

    assert np.allclose(model.log_prob(z).data, multivariate_normal(mean, cov).logpdf(z))

    noise, _ = model.noise(z)
    assert np.allclose(noise.data[:, 1], (z[:, 1] - 0.8 * z[:, 0] - 0.5) / 0.6)


def test_train_elcm_fixed_graph(dataset: PairDataset, config: ElcmTrainConfig) -> None:
    result = train_elcm_fixed_graph(Dag.chain(2), dataset, config, val_dataset=dataset[:50])

    assert result.model.dag == Dag.chain(2)
    assert [row["step"] for row in result.trace] == [0, 1, 2]
    assert np.isfinite(result.val_loss)

    again = train_elcm_fixed_graph(Dag.chain(2), dataset, config, val_dataset=dataset[:50])
    assert again.val_loss == result.val_loss


def test_infer_elcm_interventions(model: ElcmModel, dataset: PairDataset) -> None:
    posterior = infer_elcm_interventions(model, dataset.x[:20], dataset.x_tilde[:20])

    assert posterior.probs.shape == (20, 3)
    assert np.allclose(posterior.probs.sum(axis=1), 1.0)


def test_exhaustive_graph_search(dataset: PairDataset, config: ElcmTrainConfig) -> None:
    search = exhaustive_graph_search(dataset, 2, config, val_dataset=dataset[:50])

    assert len(search.dags) == 3
    assert len(search.results) == 3
    assert search.lambda_edges == pytest.approx(0.01)
    assert search.dags[search.selected_index] == search.selected
    assert search.selected_index == int(np.argmin(search.penalized_losses))
    assert search.to_dict()["selected"] == search.selected.to_list()


def test_exhaustive_graph_search_penalty(dataset: PairDataset, config: ElcmTrainConfig) -> None:
    search = exhaustive_graph_search(dataset, 2, config, lambda_edges=1e9, val_dataset=dataset[:50])

    assert search.selected == Dag.empty(2)
    assert search.selected_index == 0


def test_exhaustive_graph_search_workers(dataset: PairDataset, config: ElcmTrainConfig) -> None:
    serial = exhaustive_graph_search(dataset, 2, config, val_dataset=dataset[:50])
    parallel = exhaustive_graph_search(dataset, 2, config, val_dataset=dataset[:50], workers=2)

    assert parallel.losses == serial.losses


def test_exhaustive_graph_search_exception(dataset: PairDataset, config: ElcmTrainConfig) -> None:
    with pytest.raises(GraphSearchError):
        exhaustive_graph_search(dataset, 5, config)


def test_checkpoint(model: ElcmModel, config: ElcmTrainConfig, tmp_path: Path) -> None:
    path = tmp_path / "elcm.lcmc"
    x = np.random.default_rng(5).standard_normal((6, 2))

    save_elcm_checkpoint(path, model, config, extra={"seed": 3})
    loaded, loaded_config, header = load_elcm_checkpoint(path)

    assert loaded.dag == model.dag
    assert loaded_config == config
    assert header["seed"] == 3
    assert np.array_equal(loaded.encode_mean(x), model.encode_mean(x))
    assert np.array_equal(loaded.log_prob(Tensor(x)).data, model.log_prob(Tensor(x)).data)


def test_checkpoint_exception(tmp_path: Path) -> None:
    path = tmp_path / "other.lcmc"
    write_container(path, {"kind": "ilcm_checkpoint"}, {"a": np.zeros(1)})

    with pytest.raises(DatasetFormatError) as error:
        load_elcm_checkpoint(path)

    assert error.value.code == FormatErrorCode.BadMagic
