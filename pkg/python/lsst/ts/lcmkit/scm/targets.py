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

__all__ = ["EMPTY_TARGET", "InterventionTarget", "InterventionPrior"]

import logging
import typing
from dataclasses import dataclass

import numpy as np

from ..errors import ContractError

log = logging.getLogger(__name__)

# Index of the empty intervention in the target arrays
EMPTY_TARGET = -1


@dataclass(frozen=True)
class InterventionTarget:
    """Set of intervened variables.

    Parameters
    ----------
    targets : `frozenset` [`int`], optional
        Indices of the intervened variables, starting from 0. (the default
        is empty)
    atomic : `bool`, optional
        At most one variable is intervened or not. (the default is True)

    Raises
    ------
    `ContractError`
        If the target is atomic but has more than one variable.
    """

    targets: frozenset[int] = frozenset()
    atomic: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", frozenset(int(target) for target in self.targets))

        if self.atomic and len(self.targets) > 1:
            raise ContractError(f"Atomic target has more than one variable: {sorted(self.targets)}.")

        if any(target < 0 for target in self.targets):
            raise ContractError(f"Target indices should be >= 0: {sorted(self.targets)}.")

    @classmethod
    def from_index(cls, index: int) -> "InterventionTarget":
        """Atomic target from an index, where -1 is the empty target."""
        return cls(frozenset() if index == EMPTY_TARGET else frozenset({int(index)}))

    @property
    def is_empty(self) -> bool:
        return len(self.targets) == 0

    @property
    def index(self) -> int:
        """Index of the atomic target, -1 for the empty target."""

        if len(self.targets) > 1:
            raise ContractError("Non-atomic target has no single index.")

        return EMPTY_TARGET if self.is_empty else next(iter(self.targets))

    def mask(self, n: int) -> np.ndarray:
        """Boolean mask of the intervened variables."""

        mask = np.zeros(n, dtype=bool)
        mask[list(self.targets)] = True
        return mask

    def __contains__(self, idx: object) -> bool:
        return idx in self.targets


class InterventionPrior:
    """Distribution over the atomic targets {empty, {0}, ..., {n-1}}.

    Parameters
    ----------
    probabilities : `numpy.ndarray`
        Probabilities of the n + 1 options. The first entry is the empty
        target.

    Raises
    ------
    `ContractError`
        If the probabilities are negative or do not sum to 1.
    """

    def __init__(self, probabilities: typing.Any) -> None:
        probabilities = np.asarray(probabilities, dtype=np.float64)
        if probabilities.ndim != 1 or len(probabilities) < 2:
            raise ContractError("Probabilities should be a vector over at least two options.")

        if np.any(probabilities < 0.0) or abs(probabilities.sum() - 1.0) > 1e-9:
            raise ContractError(f"Invalid probabilities: {probabilities}.")

        self.probabilities = probabilities
        self.n = len(probabilities) - 1

        if not self.has_full_support:
            log.warning("Intervention prior does not have full support: %s.", probabilities)

    @classmethod
    def uniform(cls, n: int) -> "InterventionPrior":
        """Uniform prior over the empty target and the n atomic targets."""
        return cls(np.full(n + 1, 1.0 / (n + 1)))

    @property
    def has_full_support(self) -> bool:
        return bool(np.all(self.probabilities > 0.0))

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        """Sample the target indices.

        Parameters
        ----------
        size : `int`
            Number of samples.
        rng : `numpy.random.Generator`
            Random number generator.

        Returns
        -------
        `numpy.ndarray`
            Target indices, -1 for the empty target.
        """
        return rng.choice(self.n + 1, size=size, p=self.probabilities) - 1
