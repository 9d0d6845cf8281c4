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

__all__ = ["LrSchedule", "AdamState", "adam_step"]

import bisect
import math
import typing
from dataclasses import dataclass, field

import numpy as np

from ..constants import ADAM_BETAS, ADAM_EPSILON, LR_FLOOR_FRACTION
from ..errors import ContractError, DimensionError, NumericalDivergenceError
from .tensor import Tensor


@dataclass(frozen=True)
class LrSchedule:
    """Cosine annealing of the learning rate with restarts.

    Within each segment between restarts, the learning rate decays from
    initial_lr to floor_fraction * initial_lr along half a cosine period.

    Parameters
    ----------
    initial_lr : `float`
        Initial learning rate.
    total_steps : `int`
        Total number of steps.
    restart_steps : `tuple` [`int`], optional
        Steps where the schedule restarts. (the default is ())
    floor_fraction : `float`, optional
        Learning rate at the end of a segment relative to initial_lr. (the
        default is 0.1)
    """

    initial_lr: float
    total_steps: int
    restart_steps: tuple[int, ...] = tuple()
    floor_fraction: float = LR_FLOOR_FRACTION

    def __post_init__(self) -> None:
        if self.initial_lr <= 0.0:
            raise ContractError(f"Initial learning rate should be > 0, got {self.initial_lr}.")

        if self.total_steps < 0:
            raise ContractError(f"Total steps should be >= 0, got {self.total_steps}.")

        if list(self.restart_steps) != sorted(set(self.restart_steps)):
            raise ContractError(f"Restart steps should be strictly increasing: {self.restart_steps}.")

    def lr(self, step: int) -> float:
        """Learning rate at the step.

        Parameters
        ----------
        step : `int`
            Global step, starting from 0.

        Returns
        -------
        `float`
            Learning rate.
        """

        boundaries = [0] + [restart for restart in self.restart_steps if restart > 0]
        idx = bisect.bisect_right(boundaries, step) - 1
        start = boundaries[idx]
        end = boundaries[idx + 1] if idx + 1 < len(boundaries) else self.total_steps

        length = end - start
        if length <= 0 or step == start:
            return self.initial_lr

        progress = min((step - start) / length, 1.0)
        floor = self.floor_fraction * self.initial_lr
        return floor + (self.initial_lr - floor) * 0.5 * (1.0 + math.cos(math.pi * progress))


@dataclass
class AdamState:
    """State of the Adam optimizer.

    Parameters
    ----------
    first_moments : `list` [`numpy.ndarray`]
        First moment accumulators, one per parameter.
    second_moments : `list` [`numpy.ndarray`]
        Second moment accumulators, one per parameter.
    learning_rate : `float`
        Learning rate used at the last step.
    betas : `tuple` [`float`, `float`], optional
        Decay rates of the moments. (the default is (0.9, 0.999))
    epsilon : `float`, optional
        Offset of the denominator. (the default is 1e-8)
    step_count : `int`, optional
        Number of steps taken. (the default is 0)
    """

    first_moments: list[np.ndarray]
    second_moments: list[np.ndarray]
    learning_rate: float
    betas: tuple[float, float] = ADAM_BETAS
    epsilon: float = ADAM_EPSILON
    step_count: int = 0
    _names: list[str] = field(default_factory=list, repr=False)

    @classmethod
    def create(cls, params: typing.Sequence[Tensor], learning_rate: float, **kwargs: typing.Any) -> "AdamState":
        """Create the state with zero moments.

        Parameters
        ----------
        params : `list` [`Tensor`]
            Parameters.
        learning_rate : `float`
            Learning rate.
        **kwargs : `dict`, optional
            Additional keyword arguments of the state.

        Returns
        -------
        `AdamState`
            State.
        """
        return cls(
            first_moments=[np.zeros_like(param.data) for param in params],
            second_moments=[np.zeros_like(param.data) for param in params],
            learning_rate=learning_rate,
            _names=[param.name for param in params],
            **kwargs,
        )

    def state_dict(self) -> dict[str, np.ndarray]:
        """Moments and counters as arrays."""

        state = {"adam.step_count": np.array(float(self.step_count))}
        for idx, (first, second) in enumerate(zip(self.first_moments, self.second_moments)):
            state[f"adam.m{idx}"] = first.copy()
            state[f"adam.v{idx}"] = second.copy()

        return state

    def load_state_dict(self, state: dict[str, np.ndarray]) -> None:
        """Load the moments and counters."""

        self.step_count = int(state["adam.step_count"])
        for idx in range(len(self.first_moments)):
            self.first_moments[idx] = np.array(state[f"adam.m{idx}"], dtype=np.float64)
            self.second_moments[idx] = np.array(state[f"adam.v{idx}"], dtype=np.float64)


def adam_step(
    state: AdamState,
    params: typing.Sequence[Tensor],
    grads: typing.Sequence[Tensor],
    schedule: LrSchedule,
    step: int,
) -> AdamState:
    """Apply one Adam update to the parameters in place.

    Parameters
    ----------
    state : `AdamState`
        Optimizer state.
    params : `list` [`Tensor`]
        Parameters.
    grads : `list` [`Tensor`]
        Gradients in the order of the parameters.
    schedule : `LrSchedule`
        Learning rate schedule.
    step : `int`
        Global step used to look up the learning rate.

    Returns
    -------
    state : `AdamState`
        Updated optimizer state.

    Raises
    ------
    `DimensionError`
        If the shapes of the gradients do not match the parameters.
    `NumericalDivergenceError`
        If a gradient is not finite.
    """

    if len(params) != len(grads) or len(params) != len(state.first_moments):
        raise DimensionError("Numbers of parameters, gradients, and moments do not agree.")

    for param, grad in zip(params, grads):
        if param.shape != grad.shape:
            raise DimensionError(f"Gradient of {param.name} has the shape {grad.shape}, expect {param.shape}.")

        if not np.all(np.isfinite(grad.data)):
            raise NumericalDivergenceError(
                f"Non-finite gradient of the parameter {param.name!r} at step {step}.",
                diagnostics={"parameter": param.name, "step": step},
            )

    beta1, beta2 = state.betas
    state.step_count += 1
    state.learning_rate = schedule.lr(step)

    correction1 = 1.0 - beta1**state.step_count
    correction2 = 1.0 - beta2**state.step_count
    for idx, (param, grad) in enumerate(zip(params, grads)):
        state.first_moments[idx] = beta1 * state.first_moments[idx] + (1.0 - beta1) * grad.data
        state.second_moments[idx] = beta2 * state.second_moments[idx] + (1.0 - beta2) * grad.data**2

        update = (state.first_moments[idx] / correction1) / (
            np.sqrt(state.second_moments[idx] / correction2) + state.epsilon
        )
        param.data -= state.learning_rate * update

    return state
