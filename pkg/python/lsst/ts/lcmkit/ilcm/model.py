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

__all__ = ["IlcmModel", "InterventionPosterior", "dvae_variant"]

import logging
import typing
from dataclasses import dataclass

import numpy as np

from ..constants import DECODER_STD, LOG_SCALE_MAXIMUM, LOG_SCALE_MINIMUM, SOLUTION_HIDDEN, TOY2D_HIDDEN
from ..diffnum import Mlp, Tensor, absolute, clip, concatenate, exp, log_softmax
from ..errors import ContractError, DimensionError
from ..transforms import ConditionalAffineTransform

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class InterventionPosterior:
    """Posterior over the atomic targets.

    Parameters
    ----------
    probs : `numpy.ndarray`
        Probabilities with the shape (N, n + 1). The column 0 is the empty
        target and the column i + 1 is the target {i}.
    """

    probs: np.ndarray

    def __post_init__(self) -> None:
        probs = np.atleast_2d(np.asarray(self.probs, dtype=np.float64))
        if np.any(probs < 0.0) or np.any(np.abs(probs.sum(axis=1) - 1.0) > 1e-9):
            raise ContractError("Intervention posterior should be nonnegative and normalized.")

        object.__setattr__(self, "probs", probs)

    @property
    def n(self) -> int:
        return self.probs.shape[1] - 1

    def most_likely(self) -> np.ndarray:
        """Most likely target indices, -1 for the empty target."""
        return np.argmax(self.probs, axis=1) - 1


class IlcmModel:
    """Implicit latent causal model.

    The noise encoder is Gaussian with the mean and log standard deviation
    given by two networks. The decoder is Gaussian with a fixed standard
    deviation. The solution function s_i(e_i; e) is a conditional affine
    transform of e_i whose conditioning never reads e_i itself.

    Parameters
    ----------
    n : `int`
        Number of causal variables.
    data_dim : `int`
        Number of data dimensions.
    rng : `numpy.random.Generator`
        Random number generator of the initialization.
    hidden : `tuple` [`int`], optional
        Hidden widths of the encoder and decoder networks. (the default is
        (100, 100))
    solution_hidden : `tuple` [`int`], optional
        Hidden widths of the solution networks. (the default is (100, 100))
    decoder_std : `float`, optional
        Standard deviation of the decoder. (the default is 0.1)
    trivial_graph : `bool`, optional
        The solution functions ignore their conditioning input, which makes
        the model a disentangled VAE with a trivial graph. (the default is
        False)

    Attributes
    ----------
    intervention_raw : `Tensor`
        Unconstrained parameters of the intervention encoder. The
        coefficients are a = -exp(raw[0]), b = exp(raw[1]), c = exp(raw[2]).
    topological_order : `list` [`int`] or None
        Order enforced on the solution functions, if any.
    """

    def __init__(
        self,
        n: int,
        data_dim: int,
        rng: np.random.Generator,
        hidden: typing.Sequence[int] = TOY2D_HIDDEN,
        solution_hidden: typing.Sequence[int] = SOLUTION_HIDDEN,
        decoder_std: float = DECODER_STD,
        trivial_graph: bool = False,
    ) -> None:
        if n < 1 or data_dim < 1:
            raise DimensionError(f"Invalid sizes: n={n}, data_dim={data_dim}.")

        if decoder_std <= 0.0:
            raise ContractError(f"Decoder standard deviation should be > 0, got {decoder_std}.")

        self.n = n
        self.data_dim = data_dim
        self.decoder_std = decoder_std
        self.hidden = tuple(hidden)
        self.solution_hidden = tuple(solution_hidden)
        self.trivial_graph = trivial_graph

        self.encoder_mean = Mlp([data_dim, *hidden, n], rng=rng, name="encoder_mean")
        self.encoder_log_std = Mlp([data_dim, *hidden, n], rng=rng, name="encoder_log_std")
        self.decoder = Mlp([n, *reversed(self.hidden), data_dim], rng=rng, name="decoder")

        self.intervention_raw = Tensor(np.zeros(3), requires_grad=True, name="intervention_raw")

        self.solutions = [
            ConditionalAffineTransform(n, solution_hidden, rng=rng, name=f"solution{idx}") for idx in range(n)
        ]

        self.topological_order: list[int] | None = None
        self._update_masks()

    def _update_masks(self) -> None:
        position = None
        if self.topological_order is not None:
            position = {node: idx for idx, node in enumerate(self.topological_order)}

        for idx, solution in enumerate(self.solutions):
            mask = np.ones(self.n)
            mask[idx] = 0.0
            if self.trivial_graph:
                mask[:] = 0.0
            elif position is not None:
                mask = np.array([float(position[other] < position[idx]) for other in range(self.n)])

            solution.mask = mask

    def set_topological_order(self, order: typing.Sequence[int] | None) -> None:
        """Restrict each solution function to the variables earlier in the
        order. None removes the restriction.

        Parameters
        ----------
        order : `list` [`int`] or None
            Permutation of the variables.

        Raises
        ------
        `ContractError`
            If the order is not a permutation.
        """

        if order is not None and sorted(order) != list(range(self.n)):
            raise ContractError(f"{list(order)} is not a permutation of {self.n} variables.")

        self.topological_order = None if order is None else [int(node) for node in order]
        self._update_masks()

    def conditioning_masks(self) -> np.ndarray:
        """Matrix M with M[i, j] = 1 if the solution j reads e_i."""
        return np.stack([solution.mask for solution in self.solutions], axis=1)

    def set_identity_solutions(self) -> None:
        """Make every solution function the identity s_i(e_i; e) = e_i."""

        for solution in self.solutions:
            solution.set_identity()

    def parameters(self) -> list[Tensor]:
        """All trainable parameters in a fixed order."""

        params = self.encoder_mean.parameters() + self.encoder_log_std.parameters() + self.decoder.parameters()
        params.append(self.intervention_raw)
        for solution in self.solutions:
            params += solution.parameters()

        return params

    def intervention_coefficients(self) -> tuple[float, float, float]:
        """Coefficients (a, b, c) of the intervention encoder."""

        raw = self.intervention_raw.data
        return -float(np.exp(raw[0])), float(np.exp(raw[1])), float(np.exp(raw[2]))

    def encode(self, x: Tensor | np.ndarray) -> tuple[Tensor, Tensor]:
        """Mean and standard deviation of q(e|x).

        Parameters
        ----------
        x : `Tensor`
            Data with the shape (N, data_dim).

        Returns
        -------
        mean : `Tensor`
            Mean with the shape (N, n).
        std : `Tensor`
            Standard deviation with the shape (N, n).
        """

        mean = self.encoder_mean.forward(x)
        log_std = clip(self.encoder_log_std.forward(x), LOG_SCALE_MINIMUM, LOG_SCALE_MAXIMUM)
        return mean, exp(log_std)

    def encode_mean(self, x: np.ndarray) -> np.ndarray:
        """Mean of q(e|x) on arrays."""
        return self.encoder_mean.evaluate(x)

    def encode_std(self, x: np.ndarray) -> np.ndarray:
        """Standard deviation of q(e|x) on arrays."""
        return np.exp(np.clip(self.encoder_log_std.evaluate(x), LOG_SCALE_MINIMUM, LOG_SCALE_MAXIMUM))

    def decode(self, e: Tensor | np.ndarray) -> Tensor:
        """Mean of p(x|e)."""
        return self.decoder.forward(e)

    def decode_mean(self, e: np.ndarray) -> np.ndarray:
        """Mean of p(x|e) on arrays."""
        return self.decoder.evaluate(e)

    def intervention_logits(self, mean: Tensor, mean_tilde: Tensor) -> Tensor:
        """Unnormalized log-probabilities of the n + 1 atomic targets.

        The target {i} has the logit a + b |d_i| + c d_i^2, where d is the
        difference of the encoder means. The empty target has the logit a, so
        equal means give the uniform posterior.

        Parameters
        ----------
        mean : `Tensor`
            Encoder mean of x with the shape (N, n).
        mean_tilde : `Tensor`
            Encoder mean of x_tilde with the shape (N, n).

        Returns
        -------
        `Tensor`
            Logits with the shape (N, n + 1).
        """

        raw = self.intervention_raw
        coef_a = -exp(raw[0])
        coef_b = exp(raw[1])
        coef_c = exp(raw[2])

        delta = mean - mean_tilde
        logits = coef_a + coef_b * absolute(delta) + coef_c * delta * delta

        empty = coef_a + Tensor(np.zeros((len(delta), 1)))
        return concatenate([empty, logits], axis=1)

    def intervention_log_probs(self, mean: Tensor, mean_tilde: Tensor) -> Tensor:
        """Normalized log-probabilities with the shape (N, n + 1)."""
        return log_softmax(self.intervention_logits(mean, mean_tilde), axis=1)

    def solution_forward(self, idx: int, value: np.ndarray, conditions: np.ndarray) -> np.ndarray:
        """Evaluate s_idx(value; conditions) on arrays."""
        return self.solutions[idx].forward_array(value, conditions)

    def solution_inverse(self, idx: int, value: np.ndarray, conditions: np.ndarray) -> np.ndarray:
        """Invert s_idx(.; conditions) on arrays."""
        return self.solutions[idx].inverse_array(value, conditions)

    def state_dict(self) -> dict[str, np.ndarray]:
        """Parameters, masks, and the topological order as arrays."""

        state = dict()
        state.update(self.encoder_mean.state_dict())
        state.update(self.encoder_log_std.state_dict())
        state.update(self.decoder.state_dict())
        state["intervention_raw"] = self.intervention_raw.data.copy()
        for solution in self.solutions:
            state.update(solution.state_dict())

        if self.topological_order is not None:
            state["topological_order"] = np.array(self.topological_order, dtype=np.float64)

        return state

    def load_state_dict(self, state: dict[str, np.ndarray]) -> None:
        """Load the output of `state_dict`."""

        self.encoder_mean.load_state_dict(state)
        self.encoder_log_std.load_state_dict(state)
        self.decoder.load_state_dict(state)
        self.intervention_raw.data[...] = state["intervention_raw"]
        for solution in self.solutions:
            solution.load_state_dict(state)

        order = state.get("topological_order")
        self.set_topological_order(None if order is None else [int(node) for node in order])

    def config_dict(self) -> dict[str, typing.Any]:
        """Constructor arguments except the random number generator."""

        return {
            "n": self.n,
            "data_dim": self.data_dim,
            "hidden": list(self.hidden),
            "solution_hidden": list(self.solution_hidden),
            "decoder_std": self.decoder_std,
            "trivial_graph": self.trivial_graph,
        }


def dvae_variant(
    n: int,
    data_dim: int,
    rng: np.random.Generator,
    **kwargs: typing.Any,
) -> IlcmModel:
    """Disentangled VAE baseline: an ILCM whose solution functions ignore
    their conditioning input.

    Parameters
    ----------
    n : `int`
        Number of causal variables.
    data_dim : `int`
        Number of data dimensions.
    rng : `numpy.random.Generator`
        Random number generator of the initialization.
    **kwargs : `dict`, optional
        Additional keyword arguments of `IlcmModel`.

    Returns
    -------
    `IlcmModel`
        Model with the trivial graph.
    """
    return IlcmModel(n, data_dim, rng, trivial_graph=True, **kwargs)
