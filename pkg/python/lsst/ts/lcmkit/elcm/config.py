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

__all__ = ["ElcmTrainConfig"]

import dataclasses
import typing
from dataclasses import dataclass

from ..constants import DECODER_STD, ELCM_STEPS_CI, ELCM_STEPS_FULL, SOLUTION_HIDDEN, TOY2D_HIDDEN
from ..errors import ConfigError


@dataclass(frozen=True)
class ElcmTrainConfig:
    """Configuration of the ELCM training of one graph.

    Parameters
    ----------
    steps : `int`, optional
        Number of steps. (the default is the CI scale)
    batch_size : `int`, optional
        Batch size. (the default is 100)
    initial_lr : `float`, optional
        Initial learning rate of the cosine schedule. (the default is 1e-3)
    beta_start : `float`, optional
        Weight of the prior terms at the first step. (the default is 0.0)
    beta_final : `float`, optional
        Weight of the prior terms after the warmup. (the default is 1.0)
    beta_warmup_fraction : `float`, optional
        Fraction of the steps over which beta increases linearly. (the
        default is 0.3)
    decoder_std : `float`, optional
        Standard deviation of the decoder. (the default is 0.1)
    seed : `int`, optional
        Seed of the initialization and the batches. (the default is 0)
    hidden : `tuple` [`int`], optional
        Hidden widths of the encoder and decoder. (the default is (100, 100))
    mechanism_hidden : `tuple` [`int`], optional
        Hidden widths of the mechanism networks. (the default is (100, 100))
    log_interval : `int`, optional
        Steps between the progress messages. (the default is 1000)
    """

    steps: int = ELCM_STEPS_CI
    batch_size: int = 100
    initial_lr: float = 1e-3
    beta_start: float = 0.0
    beta_final: float = 1.0
    beta_warmup_fraction: float = 0.3
    decoder_std: float = DECODER_STD
    seed: int = 0
    hidden: tuple[int, ...] = TOY2D_HIDDEN
    mechanism_hidden: tuple[int, ...] = SOLUTION_HIDDEN
    log_interval: int = 1000

    def __post_init__(self) -> None:
        for name in ("hidden", "mechanism_hidden"):
            object.__setattr__(self, name, tuple(int(value) for value in getattr(self, name)))

        if self.steps < 0:
            raise ConfigError(f"Steps should be >= 0, got {self.steps}.")

        if self.batch_size < 1:
            raise ConfigError(f"Batch size should be positive, got {self.batch_size}.")

        if self.initial_lr <= 0.0:
            raise ConfigError(f"Initial learning rate should be > 0, got {self.initial_lr}.")

        if self.beta_start < 0.0 or self.beta_final < 0.0:
            raise ConfigError("Beta should be >= 0.")

        if not 0.0 <= self.beta_warmup_fraction <= 1.0:
            raise ConfigError(f"Warmup fraction should be in [0, 1], got {self.beta_warmup_fraction}.")

        if self.decoder_std <= 0.0:
            raise ConfigError(f"Decoder standard deviation should be > 0, got {self.decoder_std}.")

        if self.log_interval < 1:
            raise ConfigError(f"Log interval should be positive, got {self.log_interval}.")

    def beta_at(self, step: int) -> float:
        warmup = self.beta_warmup_fraction * self.steps
        progress = step / warmup if warmup > 0 else 1.0
        return self.beta_start + (self.beta_final - self.beta_start) * min(progress, 1.0)

    def with_steps(self, steps: int) -> "ElcmTrainConfig":
        return dataclasses.replace(self, steps=int(steps))

    def with_full_scale(self) -> "ElcmTrainConfig":
        return self.with_steps(ELCM_STEPS_FULL)

    def to_dict(self) -> dict[str, typing.Any]:
        content = dataclasses.asdict(self)
        for name in ("hidden", "mechanism_hidden"):
            content[name] = list(content[name])

        return content

    @classmethod
    def from_dict(cls, content: dict[str, typing.Any]) -> "ElcmTrainConfig":
        """Create the configuration from a mapping.

        Raises
        ------
        `ConfigError`
            If the mapping has unknown keys or invalid values.
        """

        unknown = set(content) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"Unknown ELCM training keys: {sorted(unknown)}.")

        try:
            return cls(**content)
        except (TypeError, ValueError) as error:
            if isinstance(error, ConfigError):
                raise
            raise ConfigError(f"Invalid ELCM training configuration: {error}.")
