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

__all__ = ["ElcmModel", "elcm_prior_logdensity", "CONSISTENCY_TOLERANCE"]

import logging
import typing

import numpy as np

from ..constants import DECODER_STD, LOG_SCALE_MAXIMUM, LOG_SCALE_MINIMUM, SOLUTION_HIDDEN, TOY2D_HIDDEN
from ..diffnum import Mlp, Tensor, as_tensor, clip, exp, stack, standard_normal_logpdf
from ..errors import ContractError, DimensionError
from ..scm import Dag, InterventionTarget
from ..transforms import ConditionalAffineTransform

log = logging.getLogger(__name__)

# Largest difference of the noise of a non-intervened variable before and
# after the intervention
CONSISTENCY_TOLERANCE = 1e-8


class ElcmModel:
    """Explicit latent causal model over a fixed graph.

    The encoder maps the data to the causal variables. The prior factorizes
    over the graph with the mechanisms z_i = f_i(eps_i; z_pa_i), conditional
    affine transforms of standard Gaussian noise. An intervened variable is
    drawn from the standard Gaussian.

    Parameters
    ----------
    dag : `Dag`
        Causal graph.
    data_dim : `int`
        Number of data dimensions.
    rng : `numpy.random.Generator`
        Random number generator of the initialization.
    hidden : `tuple` [`int`], optional
        Hidden widths of the encoder and decoder networks. (the default is
        (100, 100))
    mechanism_hidden : `tuple` [`int`], optional
        Hidden widths of the mechanism networks. (the default is (100, 100))
    decoder_std : `float`, optional
        Standard deviation of the decoder. (the default is 0.1)
    """

    def __init__(
        self,
        dag: Dag,
        data_dim: int,
        rng: np.random.Generator,
        hidden: typing.Sequence[int] = TOY2D_HIDDEN,
        mechanism_hidden: typing.Sequence[int] = SOLUTION_HIDDEN,
        decoder_std: float = DECODER_STD,
    ) -> None:
        if data_dim < 1:
            raise DimensionError(f"Invalid data dimension: {data_dim}.")

        if decoder_std <= 0.0:
            raise ContractError(f"Decoder standard deviation should be > 0, got {decoder_std}.")

        self.dag = dag
        self.n = dag.n
        self.data_dim = data_dim
        self.hidden = tuple(hidden)
        self.mechanism_hidden = tuple(mechanism_hidden)
        self.decoder_std = decoder_std

        self.encoder_mean = Mlp([data_dim, *hidden, self.n], rng=rng, name="encoder_mean")
        self.encoder_log_std = Mlp([data_dim, *hidden, self.n], rng=rng, name="encoder_log_std")
        self.decoder = Mlp([self.n, *reversed(self.hidden), data_dim], rng=rng, name="decoder")

        self.parents = [dag.parents(idx) for idx in range(self.n)]
        self.order = dag.topological_order()
        self.mechanisms = [
            ConditionalAffineTransform(len(parents), mechanism_hidden, rng=rng, name=f"mechanism{idx}")
            for idx, parents in enumerate(self.parents)
        ]

    def parameters(self) -> list[Tensor]:
        params = self.encoder_mean.parameters() + self.encoder_log_std.parameters() + self.decoder.parameters()
        for mechanism in self.mechanisms:
            params += mechanism.parameters()

        return params

    def encode(self, x: Tensor | np.ndarray) -> tuple[Tensor, Tensor]:
        """Mean and standard deviation of q(z|x)."""

        mean = self.encoder_mean.forward(x)
        log_std = clip(self.encoder_log_std.forward(x), LOG_SCALE_MINIMUM, LOG_SCALE_MAXIMUM)
        return mean, exp(log_std)

    def encode_mean(self, x: np.ndarray) -> np.ndarray:
        return self.encoder_mean.evaluate(x)

    def decode(self, z: Tensor | np.ndarray) -> Tensor:
        return self.decoder.forward(z)

    def decode_mean(self, z: np.ndarray) -> np.ndarray:
        return self.decoder.evaluate(z)

    def _conditions(self, columns: typing.Sequence[Tensor], idx: int, num: int) -> Tensor:
        parents = self.parents[idx]
        if not parents:
            return Tensor(np.zeros((num, 1)))

        return stack([columns[parent] for parent in parents], axis=1)

    def noise(self, z: Tensor | np.ndarray) -> tuple[Tensor, Tensor]:
        """Noise eps = f^-1(z) and the log-determinant of the inverse.

        Parameters
        ----------
        z : `Tensor`
            Causal variables with the shape (N, n).

        Returns
        -------
        noise : `Tensor`
            Noise with the shape (N, n).
        log_det : `Tensor`
            Sum of log |d f_i^-1 / d z_i| with the shape (N,).
        """

        z = as_tensor(z)
        num = len(z)
        columns = [z[:, idx] for idx in range(self.n)]

        noise = list()
        log_det = Tensor(np.zeros(num))
        for idx, mechanism in enumerate(self.mechanisms):
            value, term = mechanism.inverse(columns[idx], self._conditions(columns, idx, num))
            noise.append(value)
            log_det = log_det + term

        return stack(noise, axis=1), log_det

    def log_prob(self, z: Tensor | np.ndarray) -> Tensor:
        """Observational log-density log p(z) with the shape (N,)."""

        noise, log_det = self.noise(z)
        return standard_normal_logpdf(noise).sum(axis=1) + log_det

    def intervene(self, z: Tensor | np.ndarray, noise: Tensor, target: int, value: Tensor | np.ndarray) -> Tensor:
        """Causal variables after an atomic intervention with the noise of the
        other variables held fixed.

        Parameters
        ----------
        z : `Tensor`
            Causal variables before the intervention with the shape (N, n).
        noise : `Tensor`
            Noise of z with the shape (N, n).
        target : `int`
            Intervened variable, -1 for the empty target.
        value : `Tensor`
            Value of the intervened variable with the shape (N,). Ignored for
            the empty target.

        Returns
        -------
        `Tensor`
            Causal variables with the shape (N, n).
        """

        z = as_tensor(z)
        if target < 0:
            return z

        num = len(z)
        columns: list[Tensor | None] = [None] * self.n
        descendants = self.dag.descendants(target)
        for idx in self.order:
            if idx == target:
                columns[idx] = as_tensor(value)
            elif idx in descendants:
                conditions = self._conditions(typing.cast(list[Tensor], columns), idx, num)
                columns[idx], _ = self.mechanisms[idx].forward(noise[:, idx], conditions)
            else:
                columns[idx] = z[:, idx]

        return stack(typing.cast(list[Tensor], columns), axis=1)

    def state_dict(self) -> dict[str, np.ndarray]:
        state = dict()
        state.update(self.encoder_mean.state_dict())
        state.update(self.encoder_log_std.state_dict())
        state.update(self.decoder.state_dict())
        for mechanism in self.mechanisms:
            state.update(mechanism.state_dict())

        return state

    def load_state_dict(self, state: dict[str, np.ndarray]) -> None:
        self.encoder_mean.load_state_dict(state)
        self.encoder_log_std.load_state_dict(state)
        self.decoder.load_state_dict(state)
        for mechanism in self.mechanisms:
            mechanism.load_state_dict(state)

    def config_dict(self) -> dict[str, typing.Any]:
        """Constructor arguments except the random number generator."""

        return {
            "dag": self.dag.to_list(),
            "data_dim": self.data_dim,
            "hidden": list(self.hidden),
            "mechanism_hidden": list(self.mechanism_hidden),
            "decoder_std": self.decoder_std,
        }


def elcm_prior_logdensity(
    model: ElcmModel,
    z: np.ndarray,
    z_tilde: np.ndarray,
    target: InterventionTarget | int,
) -> np.ndarray | float:
    """Log-density log p(z) + log p(z_tilde | z, I) of the explicit prior.

    The non-intervened variables of z_tilde are deterministic given z and
    the intervened variable, so they contribute no density. The probability
    of the target is not included.

    Parameters
    ----------
    model : `ElcmModel`
        Model.
    z : `numpy.ndarray`
        Causal variables before the intervention with the shape (N, n) or
        (n,).
    z_tilde : `numpy.ndarray`
        Causal variables after the intervention.
    target : `InterventionTarget` or `int`
        Atomic target, -1 for the empty target.

    Returns
    -------
    `numpy.ndarray` or `float`
        Log-density of each pair, a float for a single pair.

    Raises
    ------
    `ContractError`
        If the target is not atomic or the noise of a non-intervened variable
        changes.
    """

    if isinstance(target, InterventionTarget):
        if not target.atomic or len(target.targets) > 1:
            raise ContractError(f"Target {set(target.targets)} is not atomic.")
        target = target.index

    z = np.asarray(z, dtype=np.float64)
    single = z.ndim == 1
    z = np.atleast_2d(z)
    z_tilde = np.atleast_2d(np.asarray(z_tilde, dtype=np.float64))
    if z.shape != z_tilde.shape or z.shape[1] != model.n:
        raise DimensionError(f"Shapes {z.shape} and {z_tilde.shape} do not match {model.n} variables.")

    if not -1 <= target < model.n:
        raise ContractError(f"Target should be in [-1, {model.n - 1}], got {target}.")

    noise, _ = model.noise(z)
    noise_tilde, _ = model.noise(z_tilde)

    others = [idx for idx in range(model.n) if idx != target]
    if np.any(np.abs(noise.data[:, others] - noise_tilde.data[:, others]) > CONSISTENCY_TOLERANCE):
        raise ContractError("Noise of a non-intervened variable changes under the intervention.")

    log_density = model.log_prob(z).data
    if target >= 0:
        log_density = log_density + standard_normal_logpdf(z_tilde[:, target]).data

    return float(log_density[0]) if single else log_density
