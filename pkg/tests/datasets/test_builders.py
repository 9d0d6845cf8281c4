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

from pathlib import Path

import numpy as np
import pytest
from lsst.ts.lcmkit import ConfigError, DatasetFamily, DatasetFormatError, FormatErrorCode, Split
from lsst.ts.lcmkit.container import write_container
from lsst.ts.lcmkit.datasets import (
    DatasetSpec,
    build_ground_truth,
    build_linear_scaling,
    build_toy2d,
    dataset_file_name,
    generate_dataset,
    linear_coefficient_matrix,
    read_dataset,
    write_dataset,
)
from lsst.ts.lcmkit.scm import Toy2DMechanism, verify_noise_invariance
from scipy.stats import kstest


@pytest.fixture
def spec() -> DatasetSpec:
    return DatasetSpec(DatasetFamily.LinearScaling, n=3, n_train=300, n_val=100, n_test=100, seed=4)


def test_dataset_spec(spec: DatasetSpec) -> None:
    content = spec.to_dict()

    assert content["family"] == "linear_scaling"
    assert DatasetSpec.from_dict(content) == spec
    assert spec.size(Split.Val) == 100
    assert DatasetSpec("toy2d").family == DatasetFamily.Toy2D


def test_dataset_spec_exception() -> None:
    with pytest.raises(ConfigError):
        DatasetSpec("images")

    with pytest.raises(ConfigError):
        DatasetSpec(DatasetFamily.Toy2D, n=3)

    with pytest.raises(ConfigError):
        DatasetSpec(DatasetFamily.LinearScaling, n=1)

    with pytest.raises(ConfigError):
        DatasetSpec(DatasetFamily.LinearScaling, n_train=0)

    with pytest.raises(ConfigError):
        DatasetSpec(DatasetFamily.LinearScaling, edge_probability=1.5)

    with pytest.raises(ConfigError):
        DatasetSpec.from_dict({"family": "toy2d", "colour": 1})

    with pytest.raises(ConfigError):
        DatasetSpec.from_dict({"n": 2})


def test_build_toy2d() -> None:
    scm, decoder = build_toy2d(0)

    assert scm.dag.edges() == [(0, 1)]
    assert isinstance(scm.mechanisms[1], Toy2DMechanism)
    assert decoder.data_dim == 2


def test_build_linear_scaling() -> None:
    scm, decoder = build_linear_scaling(5, seed=2)
    matrix = linear_coefficient_matrix(scm)

    assert scm.dag.is_consistent_with(range(5))
    assert np.array_equal(matrix != 0.0, scm.dag.adjacency)
    assert decoder.latent_dim == 5

    with pytest.raises(ConfigError):
        build_linear_scaling(1, seed=0)

    with pytest.raises(ConfigError):
        linear_coefficient_matrix(build_toy2d(0)[0])


def test_linear_scaling_covariance() -> None:
    scm, _ = build_linear_scaling(4, seed=3)
    inverse = np.linalg.inv(np.eye(4) - linear_coefficient_matrix(scm))
    expected = inverse.T @ inverse

    z = scm.solve(scm.sample_noise(400000, np.random.default_rng(0)))
    sample = np.cov(z, rowvar=False)

    # Compare on the scale of the correlations
    scale = np.sqrt(np.outer(np.diag(expected), np.diag(expected)))
    assert np.allclose(sample / scale, expected / scale, atol=0.02)


def test_toy2d_marginals() -> None:
    scm, _ = build_toy2d(0)

    z = scm.solve(scm.sample_noise(20000, np.random.default_rng(1)))

    assert kstest(z[:, 0], "norm").pvalue > 1e-3
    # 0.3 z_1^2 + 0.6 z_1 + 0.8 e_2 has the mean 0.3 and the variance 1.18
    assert np.mean(z[:, 1]) == pytest.approx(0.3, abs=0.04)
    assert np.var(z[:, 1]) == pytest.approx(1.18, abs=0.1)


def test_build_ground_truth_deterministic(spec: DatasetSpec) -> None:
    first, first_decoder = build_ground_truth(spec)
    second, second_decoder = build_ground_truth(spec)

    assert first.dag == second.dag
    assert np.array_equal(linear_coefficient_matrix(first), linear_coefficient_matrix(second))
    assert np.array_equal(first_decoder.matrix, second_decoder.matrix)


def test_generate_dataset(spec: DatasetSpec) -> None:
    dataset = generate_dataset(spec)

    assert set(dataset.splits) == set(Split)
    assert len(dataset.splits[Split.Train]) == 300
    assert len(dataset.splits[Split.Test]) == 100
    assert all(verify_noise_invariance(pairs) for pairs in dataset.splits.values())
    assert not np.array_equal(dataset.splits[Split.Val].e[:10], dataset.splits[Split.Test].e[:10])


def test_generate_dataset_deterministic(spec: DatasetSpec) -> None:
    first = generate_dataset(spec)
    second = generate_dataset(spec)

    for split in Split:
        assert np.array_equal(first.splits[split].x, second.splits[split].x)
        assert np.array_equal(first.splits[split].targets, second.splits[split].targets)


def test_dataset_file_name() -> None:
    assert dataset_file_name(Split.Train) == "train.lcmd"
    assert dataset_file_name("test") == "test.lcmd"


def test_write_read_dataset(spec: DatasetSpec, tmp_path: Path) -> None:
    pairs = generate_dataset(spec).splits[Split.Val]
    path = tmp_path / "data" / dataset_file_name(Split.Val)

    write_dataset(path, pairs, spec, extra={"split": "val"})
    loaded, loaded_spec = read_dataset(path)

    assert loaded_spec == spec
    assert loaded.has_truth
    assert np.array_equal(loaded.x, pairs.x)
    assert np.array_equal(loaded.z_tilde, pairs.z_tilde)
    assert np.array_equal(loaded.targets, pairs.targets)
    assert loaded.targets.dtype == np.int64


def test_write_dataset_byte_identical(spec: DatasetSpec, tmp_path: Path) -> None:
    write_dataset(tmp_path / "first.lcmd", generate_dataset(spec).splits[Split.Train], spec)
    write_dataset(tmp_path / "second.lcmd", generate_dataset(spec).splits[Split.Train], spec)

    assert (tmp_path / "first.lcmd").read_bytes() == (tmp_path / "second.lcmd").read_bytes()


def test_read_dataset_exception(tmp_path: Path) -> None:
    path = tmp_path / "other.lcmd"
    write_container(path, {"kind": "ilcm_checkpoint"}, {"a": np.zeros(2)})

    with pytest.raises(DatasetFormatError) as error:
        read_dataset(path)

    assert error.value.code == FormatErrorCode.BadMagic
