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

__all__ = ["TrainConfig", "beta_vae_variant"]

import dataclasses
import typing
from dataclasses import dataclass

from ..constants import (
    DECODER_STD,
    SCALING_STEPS_FULL,
    SOLUTION_HIDDEN,
    TOY2D_HIDDEN,
    TOY2D_STEPS_CI,
    TOY2D_STEPS_FULL,
)
from ..enums import DatasetFamily
from ..errors import ConfigError


@dataclass(frozen=True)
class TrainConfig:
    """Configuration of the ILCM training.

    Parameters
    ----------
    steps : `tuple` [`int`], optional
        Steps of the four training phases. (the default is the CI scale of
        the 2D toy problem)
    batch_size : `int`, optional
        Batch size. (the default is 100)
    initial_lr : `float`, optional
        Initial learning rate of each cosine segment. (the default is 1e-3)
    beta_start : `float`, optional
        Weight of the prior terms in phase 1 and at the start of phase 2.
        (the default is 0.0)
    beta_final : `float`, optional
        Final weight of the prior terms. (the default is 1.0)
    beta_warmup_fraction : `float`, optional
        Fraction of phase 2 over which beta increases linearly. (the default
        is 0.5)
    alpha : `float`, optional
        Weight of the reconstruction regularizer. (the default is 1e-2)
    gamma : `float`, optional
        Weight of the negative entropy of the batch-aggregate intervention
        posterior. (the default is 0.0)
    decoder_std : `float`, optional
        Standard deviation of the decoder. (the default is 0.1)
    seed : `int`, optional
        Seed of the initialization and the batches. (the default is 0)
    hidden : `tuple` [`int`], optional
        Hidden widths of the encoder and decoder. (the default is (100, 100))
    solution_hidden : `tuple` [`int`], optional
        Hidden widths of the solution networks. (the default is (100, 100))
    fix_topological_order : `bool`, optional
        Infer and enforce the topological order at the start of phase 4.
        (the default is True)
    log_interval : `int`, optional
        Steps between the progress messages. (the default is 1000)

    Raises
    ------
    `ConfigError`
        If a field is invalid.
    """

    steps: tuple[int, int, int, int] = TOY2D_STEPS_CI
    batch_size: int = 100
    initial_lr: float = 1e-3
    beta_start: float = 0.0
    beta_final: float = 1.0
    beta_warmup_fraction: float = 0.5
    alpha: float = 1e-2
    gamma: float = 0.0
    decoder_std: float = DECODER_STD
    seed: int = 0
    hidden: tuple[int, ...] = TOY2D_HIDDEN
    solution_hidden: tuple[int, ...] = SOLUTION_HIDDEN
    fix_topological_order: bool = True
    log_interval: int = 1000

    def __post_init__(self) -> None:
        for name in ("steps", "hidden", "solution_hidden"):
            object.__setattr__(self, name, tuple(int(value) for value in getattr(self, name)))

        if len(self.steps) != 4 or any(value < 0 for value in self.steps):
            raise ConfigError(f"Steps should be four nonnegative integers, got {self.steps}.")

        if self.batch_size < 1:
            raise ConfigError(f"Batch size should be positive, got {self.batch_size}.")

        if self.initial_lr <= 0.0:
            raise ConfigError(f"Initial learning rate should be > 0, got {self.initial_lr}.")

        for name in ("beta_start", "beta_final", "alpha", "gamma"):
            if getattr(self, name) < 0.0:
                raise ConfigError(f"{name} should be >= 0, got {getattr(self, name)}.")

        if not 0.0 <= self.beta_warmup_fraction <= 1.0:
            raise ConfigError(f"Warmup fraction should be in [0, 1], got {self.beta_warmup_fraction}.")

        if self.decoder_std <= 0.0:
            raise ConfigError(f"Decoder standard deviation should be > 0, got {self.decoder_std}.")

        if self.log_interval < 1:
            raise ConfigError(f"Log interval should be positive, got {self.log_interval}.")

    @property
    def total_steps(self) -> int:
        return sum(self.steps)

    @property
    def phase_boundaries(self) -> tuple[int, int, int, int]:
        """First global step of each phase."""

        first = 0
        boundaries = list()
        for value in self.steps:
            boundaries.append(first)
            first += value

        return tuple(boundaries)  # type: ignore[return-value]

    def phase_at(self, step: int) -> int:
        """Phase (1 to 4) of the global step."""

        phase = 1
        for idx, first in enumerate(self.phase_boundaries):
            if step >= first and self.steps[idx] > 0:
                phase = idx + 1

        return phase

    def beta_at(self, step: int) -> float:
        """Weight of the prior terms at the global step."""

        phase = self.phase_at(step)
        if phase == 1:
            return self.beta_start

        if phase > 2:
            return self.beta_final

        warmup = self.beta_warmup_fraction * self.steps[1]
        progress = (step - self.phase_boundaries[1]) / warmup if warmup > 0 else 1.0
        return self.beta_start + (self.beta_final - self.beta_start) * min(progress, 1.0)

    def with_steps(self, steps: typing.Sequence[int]) -> "TrainConfig":
        return dataclasses.replace(self, steps=tuple(steps))

    def with_full_scale(self, family: DatasetFamily) -> "TrainConfig":
        """Configuration with the full-scale steps of the dataset family."""

        steps = TOY2D_STEPS_FULL if DatasetFamily(family) == DatasetFamily.Toy2D else SCALING_STEPS_FULL
        return self.with_steps(steps)

    def to_dict(self) -> dict[str, typing.Any]:
        content = dataclasses.asdict(self)
        for name in ("steps", "hidden", "solution_hidden"):
            content[name] = list(content[name])

        return content

    @classmethod
    def from_dict(cls, content: dict[str, typing.Any]) -> "TrainConfig":
        """Create the configuration from a mapping.

        Raises
        ------
        `ConfigError`
            If the mapping has unknown keys or invalid values.
        """

        unknown = set(content) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"Unknown training keys: {sorted(unknown)}.")

        try:
            return cls(**content)
        except (TypeError, ValueError) as error:
            if isinstance(error, ConfigError):
                raise
            raise ConfigError(f"Invalid training configuration: {error}.")


def beta_vae_variant(config: TrainConfig) -> TrainConfig:
    """Configuration of the unstructured beta-VAE baseline.

    All steps use the phase 1 loss, which treats x and x_tilde as
    independent samples with a standard Gaussian prior, and beta is fixed at
    its final value.

    Parameters
    ----------
    config : `TrainConfig`
        ILCM configuration.

    Returns
    -------
    `TrainConfig`
        Baseline configuration.
    """
    return dataclasses.replace(
        config,
        steps=(config.total_steps, 0, 0, 0),
        beta_start=config.beta_final,
        fix_topological_order=False,
    )
