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
    "Decoder",
    "WeakPair",
    "PairDataset",
    "sample_weak_pairs",
    "verify_noise_invariance",
]

import logging
import typing
from dataclasses import dataclass

import numpy as np

from ..errors import ContractError, DimensionError
from .model import Scm
from .targets import EMPTY_TARGET, InterventionPrior, InterventionTarget

log = logging.getLogger(__name__)


@typing.runtime_checkable
class Decoder(typing.Protocol):
    """Map from the causal variables to the data space."""

    @property
    def latent_dim(self) -> int: ...

    @property
    def data_dim(self) -> int: ...

    def decode(self, z: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class WeakPair:
    """One pair of observations before and after an unknown intervention.

    The ground truth fields are None when the pair comes without truth.
    """

    x: np.ndarray
    x_tilde: np.ndarray
    z: np.ndarray | None = None
    z_tilde: np.ndarray | None = None
    e: np.ndarray | None = None
    e_tilde: np.ndarray | None = None
    target: InterventionTarget | None = None

    @property
    def has_truth(self) -> bool:
        return not any(value is None for value in (self.z, self.z_tilde, self.e, self.e_tilde, self.target))


class PairDataset(typing.Sequence[WeakPair]):
    """Array-backed sequence of weak pairs.

    Parameters
    ----------
    x : `numpy.ndarray`
        Observations before the intervention with the shape (N, data_dim).
    x_tilde : `numpy.ndarray`
        Observations after the intervention with the shape (N, data_dim).
    z : `numpy.ndarray` or None, optional
        True causal variables with the shape (N, n). (the default is None)
    z_tilde : `numpy.ndarray` or None, optional
        True causal variables after the intervention. (the default is None)
    e : `numpy.ndarray` or None, optional
        True noise. (the default is None)
    e_tilde : `numpy.ndarray` or None, optional
        True noise after the intervention. (the default is None)
    targets : `numpy.ndarray` or None, optional
        True target indices with the shape (N,), -1 for the empty target.
        (the default is None)

    Raises
    ------
    `DimensionError`
        If the arrays do not agree on the number of pairs or the widths.
    """

    TRUTH_FIELDS = ("z", "z_tilde", "e", "e_tilde", "targets")

    def __init__(
        self,
        x: np.ndarray,
        x_tilde: np.ndarray,
        z: np.ndarray | None = None,
        z_tilde: np.ndarray | None = None,
        e: np.ndarray | None = None,
        e_tilde: np.ndarray | None = None,
        targets: np.ndarray | None = None,
    ) -> None:
        self.x = np.asarray(x, dtype=np.float64)
        self.x_tilde = np.asarray(x_tilde, dtype=np.float64)

        if self.x.ndim != 2 or self.x.shape != self.x_tilde.shape:
            raise DimensionError(f"Shapes of x and x_tilde disagree: {self.x.shape} and {self.x_tilde.shape}.")

        truth = [z, z_tilde, e, e_tilde]
        self.z, self.z_tilde, self.e, self.e_tilde = [
            None if value is None else np.asarray(value, dtype=np.float64) for value in truth
        ]
        self.targets = None if targets is None else np.asarray(targets, dtype=np.int64).reshape(-1)

        for name in self.TRUTH_FIELDS:
            value = getattr(self, name)
            if value is not None and len(value) != len(self.x):
                raise DimensionError(f"{name} has {len(value)} rows, expect {len(self.x)}.")

        latents = [value for value in (self.z, self.z_tilde, self.e, self.e_tilde) if value is not None]
        if any(value.shape != latents[0].shape for value in latents):
            raise DimensionError("Ground truth latent arrays should have the same shape.")

    @property
    def data_dim(self) -> int:
        return self.x.shape[1]

    @property
    def latent_dim(self) -> int | None:
        return None if self.z is None else self.z.shape[1]

    @property
    def has_truth(self) -> bool:
        return all(getattr(self, name) is not None for name in self.TRUTH_FIELDS)

    def __len__(self) -> int:
        return len(self.x)

    @typing.overload
    def __getitem__(self, index: int) -> WeakPair: ...

    @typing.overload
    def __getitem__(self, index: slice | np.ndarray) -> "PairDataset": ...

    def __getitem__(self, index: typing.Any) -> typing.Any:
        if isinstance(index, (int, np.integer)):
            if index < -len(self) or index >= len(self):
                raise IndexError(f"Index {index} out of range for {len(self)} pairs.")

            target = None
            if self.targets is not None:
                target = InterventionTarget.from_index(int(self.targets[index]))

            return WeakPair(
                x=self.x[index],
                x_tilde=self.x_tilde[index],
                z=None if self.z is None else self.z[index],
                z_tilde=None if self.z_tilde is None else self.z_tilde[index],
                e=None if self.e is None else self.e[index],
                e_tilde=None if self.e_tilde is None else self.e_tilde[index],
                target=target,
            )

        return PairDataset(
            self.x[index],
            self.x_tilde[index],
            **{name: None if getattr(self, name) is None else getattr(self, name)[index] for name in self.TRUTH_FIELDS},
        )

    def arrays(self) -> dict[str, np.ndarray]:
        """Arrays keyed by field name. Missing truth fields are skipped."""

        arrays = {"x": self.x, "x_tilde": self.x_tilde}
        for name in self.TRUTH_FIELDS:
            value = getattr(self, name)
            if value is not None:
                arrays[name] = value

        return arrays

    def sample_batch(self, batch_size: int, rng: np.random.Generator) -> "PairDataset":
        """Random batch drawn with replacement."""
        return self[rng.integers(0, len(self), size=batch_size)]

    def iter_batches(self, batch_size: int) -> typing.Iterator["PairDataset"]:
        """Consecutive batches in the stored order."""

        for start in range(0, len(self), batch_size):
            yield self[start : start + batch_size]

    @classmethod
    def from_pairs(cls, pairs: typing.Sequence[WeakPair]) -> "PairDataset":
        """Stack the weak pairs.

        Parameters
        ----------
        pairs : `list` [`WeakPair`]
            Non-empty list of pairs. Either all or none carry the truth.

        Returns
        -------
        `PairDataset`
            Dataset.
        """

        if len(pairs) == 0:
            raise ContractError("Can not infer the widths from an empty list of pairs.")

        has_truth = all(pair.has_truth for pair in pairs)
        kwargs: dict[str, typing.Any] = dict()
        if has_truth:
            kwargs = {name: np.stack([getattr(pair, name) for pair in pairs]) for name in ("z", "z_tilde", "e", "e_tilde")}
            kwargs["targets"] = np.array([pair.target.index for pair in pairs])

        return cls(
            np.stack([pair.x for pair in pairs]),
            np.stack([pair.x_tilde for pair in pairs]),
            **kwargs,
        )


def sample_weak_pairs(
    scm: Scm,
    decoder: Decoder,
    n_samples: int,
    intervention_prior: InterventionPrior,
    rng: np.random.Generator,
) -> PairDataset:
    """Sample the weakly supervised pairs with the ground truth.

    Parameters
    ----------
    scm : `Scm`
        Structural causal model.
    decoder : `Decoder`
        Map from the causal variables to the data space.
    n_samples : `int`
        Number of pairs.
    intervention_prior : `InterventionPrior`
        Distribution of the atomic targets.
    rng : `numpy.random.Generator`
        Random number generator.

    Returns
    -------
    `PairDataset`
        Pairs.

    Raises
    ------
    `DimensionError`
        If the decoder or the prior does not match the number of variables.
    """

    if decoder.latent_dim != scm.n:
        raise DimensionError(f"Decoder reads {decoder.latent_dim} variables, the model has {scm.n}.")

    if intervention_prior.n != scm.n:
        raise DimensionError(f"Intervention prior covers {intervention_prior.n} variables, the model has {scm.n}.")

    if n_samples < 0:
        raise ContractError(f"Number of samples should be >= 0, got {n_samples}.")

    noise = scm.sample_noise(n_samples, rng)
    targets = intervention_prior.sample(n_samples, rng)

    target_mask = np.zeros((n_samples, scm.n), dtype=bool)
    rows = np.flatnonzero(targets != EMPTY_TARGET)
    target_mask[rows, targets[rows]] = True

    z = scm.solve(noise)
    z_tilde, noise_tilde = scm.intervene_batch(z, noise, target_mask, rng)

    log.debug("Sampled %d pairs over %d variables.", n_samples, scm.n)

    return PairDataset(
        x=decoder.decode(z).reshape(n_samples, decoder.data_dim),
        x_tilde=decoder.decode(z_tilde).reshape(n_samples, decoder.data_dim),
        z=z,
        z_tilde=z_tilde,
        e=noise,
        e_tilde=noise_tilde,
        targets=targets,
    )


def verify_noise_invariance(pairs: PairDataset | typing.Sequence[WeakPair]) -> bool:
    """Check that only the targeted noise changes in every pair.

    Parameters
    ----------
    pairs : `PairDataset` or `list` [`WeakPair`]
        Pairs with the ground truth.

    Returns
    -------
    `bool`
        True if e_i == e_tilde_i exactly for every variable outside of the
        target and e_i != e_tilde_i for every target.

    Raises
    ------
    `ContractError`
        If the pairs do not carry the ground truth.
    """

    if not isinstance(pairs, PairDataset):
        if len(pairs) == 0:
            return True
        if not all(pair.has_truth for pair in pairs):
            raise ContractError("Pairs do not carry the ground truth.")
        pairs = PairDataset.from_pairs(pairs)

    if not pairs.has_truth:
        raise ContractError("Pairs do not carry the ground truth.")

    if len(pairs) == 0:
        return True

    n = pairs.e.shape[1]
    target_mask = np.zeros((len(pairs), n), dtype=bool)
    rows = np.flatnonzero(pairs.targets != EMPTY_TARGET)
    target_mask[rows, pairs.targets[rows]] = True

    is_equal = pairs.e == pairs.e_tilde
    return bool(np.all(is_equal[~target_mask]) and not np.any(is_equal[target_mask]))
