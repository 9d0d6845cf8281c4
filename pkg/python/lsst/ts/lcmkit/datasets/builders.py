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
    "DatasetSpec",
    "GeneratedDataset",
    "build_toy2d",
    "build_linear_scaling",
    "build_ground_truth",
    "generate_dataset",
    "linear_coefficient_matrix",
]

import logging
import typing
from dataclasses import asdict, dataclass, field

import numpy as np

from ..constants import NUM_TEST, NUM_TRAIN, NUM_VAL
from ..enums import DatasetFamily, Split
from ..errors import ConfigError
from ..scm import (
    Dag,
    InterventionPrior,
    LinearAdditiveMechanism,
    PairDataset,
    Scm,
    Toy2DMechanism,
    sample_weak_pairs,
)
from ..utils import make_rng, spawn_rngs
from .decoders import CouplingFlowDecoder, RotationDecoder

log = logging.getLogger(__name__)

# Mixture of the linear coefficients: random sign, |a| ~ N(1, 0.3^2)
COEFFICIENT_MEAN = 1.0
COEFFICIENT_STD = 0.3


@dataclass(frozen=True)
class DatasetSpec:
    """Specification of a synthetic dataset.

    Parameters
    ----------
    family : `DatasetFamily`
        Dataset family.
    n : `int`, optional
        Number of causal variables. The 2D toy family requires 2. (the
        default is 2)
    n_train : `int`, optional
        Number of training pairs. (the default is 100000)
    n_val : `int`, optional
        Number of validation pairs. (the default is 10000)
    n_test : `int`, optional
        Number of test pairs. (the default is 10000)
    seed : `int`, optional
        Seed of the ground truth and the samples. (the default is 0)
    edge_probability : `float`, optional
        Edge probability of the random graphs. (the default is 0.5)

    Raises
    ------
    `ConfigError`
        If a field is invalid.
    """

    family: DatasetFamily
    n: int = 2
    n_train: int = NUM_TRAIN
    n_val: int = NUM_VAL
    n_test: int = NUM_TEST
    seed: int = 0
    edge_probability: float = field(default=0.5)

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "family", DatasetFamily(self.family))
        except ValueError:
            raise ConfigError(f"Unknown dataset family: {self.family!r}.")

        if self.family == DatasetFamily.Toy2D and self.n != 2:
            raise ConfigError(f"The 2D toy dataset has 2 variables, got n={self.n}.")

        if self.n < 2:
            raise ConfigError(f"Number of causal variables should be >= 2, got {self.n}.")

        for name in ("n_train", "n_val", "n_test"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} should be positive, got {getattr(self, name)}.")

        if not 0.0 <= self.edge_probability <= 1.0:
            raise ConfigError(f"Edge probability should be in [0, 1], got {self.edge_probability}.")

    def size(self, split: Split) -> int:
        """Number of pairs of the split."""
        return {Split.Train: self.n_train, Split.Val: self.n_val, Split.Test: self.n_test}[Split(split)]

    def to_dict(self) -> dict[str, typing.Any]:
        content = asdict(self)
        content["family"] = self.family.value
        return content

    @classmethod
    def from_dict(cls, content: dict[str, typing.Any]) -> "DatasetSpec":
        """Create the specification from a mapping.

        Raises
        ------
        `ConfigError`
            If the mapping has unknown keys or invalid values.
        """

        known = set(cls.__dataclass_fields__)
        unknown = set(content) - known
        if unknown:
            raise ConfigError(f"Unknown dataset keys: {sorted(unknown)}.")

        if "family" not in content:
            raise ConfigError("Dataset family is required.")

        try:
            return cls(**content)
        except TypeError as error:
            raise ConfigError(f"Invalid dataset specification: {error}.")


@dataclass
class GeneratedDataset:
    """Ground truth and the sampled splits of a dataset."""

    spec: DatasetSpec
    scm: Scm
    decoder: typing.Any
    splits: dict[Split, PairDataset]


def build_toy2d(seed: int) -> tuple[Scm, CouplingFlowDecoder]:
    """Build the 2D toy ground truth.

    The model is z_1 = e_1 and z_2 = 0.3 z_1^2 + 0.6 z_1 + 0.8 e_2 with a
    randomly initialized coupling flow decoder.

    Parameters
    ----------
    seed : `int`
        Seed of the decoder.

    Returns
    -------
    scm : `Scm`
        Structural causal model on the graph 0 -> 1.
    decoder : `CouplingFlowDecoder`
        Decoder.
    """

    scm = Scm(Dag.chain(2), [LinearAdditiveMechanism(), Toy2DMechanism()])
    return scm, CouplingFlowDecoder(2, make_rng(seed))


def build_linear_scaling(n: int, seed: int, edge_probability: float = 0.5) -> tuple[Scm, RotationDecoder]:
    """Build a linear additive noise model with a random graph.

    Parameters
    ----------
    n : `int`
        Number of causal variables, at least 2.
    seed : `int`
        Seed.
    edge_probability : `float`, optional
        Probability of each edge along the order 0, ..., n-1. (the default
        is 0.5)

    Returns
    -------
    scm : `Scm`
        Structural causal model.
    decoder : `RotationDecoder`
        Random rotation decoder.

    Raises
    ------
    `ConfigError`
        If n < 2.
    """

    if n < 2:
        raise ConfigError(f"Number of causal variables should be >= 2, got {n}.")

    rng = make_rng(seed)
    dag = Dag.random(n, edge_probability, rng)

    mechanisms = list()
    for idx in range(n):
        num_parents = len(dag.parents(idx))
        signs = rng.choice((-1.0, 1.0), size=num_parents)
        magnitudes = COEFFICIENT_MEAN + COEFFICIENT_STD * rng.standard_normal(num_parents)
        mechanisms.append(LinearAdditiveMechanism(signs * magnitudes))

    return Scm(dag, mechanisms), RotationDecoder(n, rng)


def build_ground_truth(spec: DatasetSpec) -> tuple[Scm, typing.Any]:
    """Build the structural causal model and the decoder of the spec."""

    if spec.family == DatasetFamily.Toy2D:
        return build_toy2d(spec.seed)

    return build_linear_scaling(spec.n, spec.seed, edge_probability=spec.edge_probability)


def generate_dataset(spec: DatasetSpec) -> GeneratedDataset:
    """Generate the training, validation, and test splits.

    The result is a pure function of the spec.

    Parameters
    ----------
    spec : `DatasetSpec`
        Specification.

    Returns
    -------
    `GeneratedDataset`
        Ground truth and the splits.
    """

    scm, decoder = build_ground_truth(spec)
    prior = InterventionPrior.uniform(scm.n)

    splits = dict()
    for split, rng in zip(Split, spawn_rngs(spec.seed, len(Split))):
        splits[split] = sample_weak_pairs(scm, decoder, spec.size(split), prior, rng)

    log.info(
        "Generated the %s dataset with %d variables and %s pairs.",
        spec.family.value,
        scm.n,
        "/".join(str(len(pairs)) for pairs in splits.values()),
    )

    return GeneratedDataset(spec=spec, scm=scm, decoder=decoder, splits=splits)


def _truth_is_linear(scm: Scm) -> bool:
    return all(isinstance(mechanism, LinearAdditiveMechanism) for mechanism in scm.mechanisms)


def linear_coefficient_matrix(scm: Scm) -> np.ndarray:
    """Matrix A with A[i, j] the coefficient of the edge i -> j."""

    if not _truth_is_linear(scm):
        raise ConfigError("The model has non-linear mechanisms.")

    matrix = np.zeros((scm.n, scm.n))
    for idx, mechanism in enumerate(scm.mechanisms):
        matrix[scm.dag.parents(idx), idx] = mechanism.coefficients

    return matrix
