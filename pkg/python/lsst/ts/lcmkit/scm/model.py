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

__all__ = ["Scm", "solve", "solve_inverse", "intervene_sample"]

import typing

import numpy as np

from ..errors import ContractError, DimensionError, NumericalError
from .dag import Dag
from .mechanisms import Mechanism
from .targets import EMPTY_TARGET, InterventionTarget


class Scm:
    """Structural causal model with standard Gaussian noise.

    Parameters
    ----------
    dag : `Dag`
        Causal graph.
    mechanisms : `list` [`Mechanism`]
        Mechanism of each variable. The mechanism i reads the parents of i in
        increasing order.

    Raises
    ------
    `ContractError`
        If the mechanisms do not match the graph.
    """

    def __init__(self, dag: Dag, mechanisms: typing.Sequence[Mechanism]) -> None:
        if len(mechanisms) != dag.n:
            raise ContractError(f"Expect {dag.n} mechanisms, got {len(mechanisms)}.")

        for idx, mechanism in enumerate(mechanisms):
            num_parents = len(dag.parents(idx))
            if mechanism.n_parents != num_parents:
                raise ContractError(
                    f"Mechanism {idx} reads {mechanism.n_parents} parents, the graph has {num_parents}."
                )

        self.dag = dag
        self.mechanisms = tuple(mechanisms)
        self.n = dag.n

        self._parents = [dag.parents(idx) for idx in range(self.n)]
        self._order = dag.topological_order()

    def _as_batch(self, values: typing.Any, label: str) -> tuple[np.ndarray, bool]:
        values = np.asarray(values, dtype=np.float64)
        is_single = values.ndim == 1
        batch = values.reshape(1, -1) if is_single else values

        if batch.ndim != 2 or batch.shape[1] != self.n:
            raise DimensionError(f"{label} should have {self.n} columns, got the shape {values.shape}.")

        return batch, is_single

    def sample_noise(self, size: int, rng: np.random.Generator) -> np.ndarray:
        """Draw standard Gaussian noise with the shape (size, n)."""
        return rng.standard_normal((size, self.n))

    def solve(self, noise: typing.Any, order: typing.Sequence[int] | None = None) -> np.ndarray:
        """Apply the mechanisms in a topological order.

        Parameters
        ----------
        noise : `numpy.ndarray`
            Noise with the shape (n,) or (N, n).
        order : `list` [`int`] or None, optional
            Topological order to use. If None, the lexicographic topological
            order of the graph. (the default is None)

        Returns
        -------
        `numpy.ndarray`
            Causal variables with the shape of the noise.

        Raises
        ------
        `ContractError`
            If the order is not a topological order of the graph.
        """

        noise_batch, is_single = self._as_batch(noise, "Noise")

        if order is None:
            order = self._order
        elif sorted(order) != list(range(self.n)) or not self.dag.is_consistent_with(order):
            raise ContractError(f"{list(order)} is not a topological order of {self.dag}.")

        z = np.zeros_like(noise_batch)
        for idx in order:
            z[:, idx] = self.mechanisms[idx].forward(noise_batch[:, idx], z[:, self._parents[idx]])

        return z[0] if is_single else z

    def solve_inverse(self, z: typing.Any) -> np.ndarray:
        """Recover the noise from the causal variables.

        Parameters
        ----------
        z : `numpy.ndarray`
            Causal variables with the shape (n,) or (N, n).

        Returns
        -------
        `numpy.ndarray`
            Noise with the shape of z.

        Raises
        ------
        `NumericalError`
            If a mechanism can not be inverted. The error carries the index of
            the variable.
        """

        z_batch, is_single = self._as_batch(z, "Causal variables")

        noise = np.zeros_like(z_batch)
        for idx in range(self.n):
            try:
                noise[:, idx] = self.mechanisms[idx].inverse(z_batch[:, idx], z_batch[:, self._parents[idx]])
            except NumericalError as error:
                raise NumericalError(str(error), index=idx) from error

        return noise[0] if is_single else noise

    def intervene_batch(
        self,
        z: np.ndarray,
        noise: np.ndarray,
        target_mask: np.ndarray,
        rng: np.random.Generator,
    ) -> tuple[np.ndarray, np.ndarray]:
        """Apply perfect stochastic interventions to a batch.

        The intervened variables are drawn from the standard Gaussian. The
        other variables keep their noise, so only the descendants of the
        targets change.

        Parameters
        ----------
        z : `numpy.ndarray`
            Causal variables before the intervention with the shape (N, n).
        noise : `numpy.ndarray`
            Noise of z with the shape (N, n).
        target_mask : `numpy.ndarray`
            Boolean mask of the intervened variables with the shape (N, n).
        rng : `numpy.random.Generator`
            Random number generator of the intervention values.

        Returns
        -------
        z_tilde : `numpy.ndarray`
            Causal variables after the intervention.
        noise_tilde : `numpy.ndarray`
            Noise after the intervention.
        """

        z, _ = self._as_batch(z, "Causal variables")
        noise, _ = self._as_batch(noise, "Noise")
        target_mask = np.asarray(target_mask, dtype=bool).reshape(z.shape)

        values = rng.standard_normal(z.shape)

        z_tilde = z.copy()
        noise_tilde = noise.copy()
        changed = np.zeros(z.shape, dtype=bool)
        for idx in self._order:
            parents = self._parents[idx]
            is_target = target_mask[:, idx]
            is_affected = changed[:, parents].any(axis=1) & ~is_target

            if np.any(is_affected):
                rows = np.flatnonzero(is_affected)
                z_tilde[rows, idx] = self.mechanisms[idx].forward(noise[rows, idx], z_tilde[np.ix_(rows, parents)])

            if np.any(is_target):
                rows = np.flatnonzero(is_target)
                z_tilde[rows, idx] = values[rows, idx]
                try:
                    noise_tilde[rows, idx] = self.mechanisms[idx].inverse(
                        z_tilde[rows, idx], z_tilde[np.ix_(rows, parents)]
                    )
                except NumericalError as error:
                    raise NumericalError(str(error), index=idx) from error

            changed[:, idx] = is_target | is_affected

        return z_tilde, noise_tilde


def solve(scm: Scm, noise: typing.Any) -> np.ndarray:
    """Causal variables of the noise. See `Scm.solve`."""
    return scm.solve(noise)


def solve_inverse(scm: Scm, z: typing.Any) -> np.ndarray:
    """Noise of the causal variables. See `Scm.solve_inverse`."""
    return scm.solve_inverse(z)


def intervene_sample(
    scm: Scm,
    noise: typing.Any,
    target: InterventionTarget | int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Intervene on a single sample.

    Parameters
    ----------
    scm : `Scm`
        Structural causal model.
    noise : `numpy.ndarray`
        Noise with the shape (n,).
    target : `InterventionTarget` or `int`
        Target, or its index with -1 for the empty target.
    rng : `numpy.random.Generator`
        Random number generator.

    Returns
    -------
    z_tilde : `numpy.ndarray`
        Causal variables after the intervention.
    noise_tilde : `numpy.ndarray`
        Noise after the intervention.
    """

    if not isinstance(target, InterventionTarget):
        target = InterventionTarget.from_index(EMPTY_TARGET if target is None else int(target))

    if any(idx >= scm.n for idx in target.targets):
        raise ContractError(f"Target {sorted(target.targets)} is out of range for {scm.n} variables.")

    noise = np.asarray(noise, dtype=np.float64).reshape(1, scm.n)
    z = scm.solve(noise)
    z_tilde, noise_tilde = scm.intervene_batch(z, noise, target.mask(scm.n).reshape(1, -1), rng)

    return z_tilde[0], noise_tilde[0]
