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

__all__ = ["EvalOptions", "ExperimentConfig", "RunRecord", "load_experiment_config"]

import dataclasses
import typing
from dataclasses import dataclass, field
from pathlib import Path

from ..constants import MAX_ENUMERATION_SIZE
from ..datasets import DatasetSpec
from ..elcm import ElcmTrainConfig
from ..enums import Method
from ..errors import ConfigError
from ..ilcm import TrainConfig
from ..utils import compute_config_hash, get_config_dir, read_yaml_file


@dataclass(frozen=True)
class EvalOptions:
    """Options of the evaluation.

    Parameters
    ----------
    max_pairs : `int`, optional
        Largest number of test pairs used for the metrics. (the default is
        10000)
    graph_pairs : `int`, optional
        Largest number of training and validation samples used by the graph
        heuristic. (the default is 10000)
    p_min : `float` or None, optional
        Threshold of the paternity scores. If None, relative to the largest
        score. (the default is None)
    alpha : `float`, optional
        Significance level of the interventional discovery. (the default is
        0.01)
    traversal_points : `int`, optional
        Grid points per latent of the traversal. (the default is 21)
    """

    max_pairs: int = 10000
    graph_pairs: int = 10000
    p_min: float | None = None
    alpha: float = 0.01
    traversal_points: int = 21

    def __post_init__(self) -> None:
        if self.max_pairs < 1 or self.graph_pairs < 1 or self.traversal_points < 2:
            raise ConfigError("Evaluation sizes should be positive.")

        if self.p_min is not None and self.p_min <= 0.0:
            raise ConfigError(f"p_min should be > 0, got {self.p_min}.")

        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha should be in (0, 1), got {self.alpha}.")

    @classmethod
    def from_dict(cls, content: dict[str, typing.Any]) -> "EvalOptions":
        unknown = set(content) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"Unknown evaluation keys: {sorted(unknown)}.")

        return cls(**content)


@dataclass(frozen=True)
class ExperimentConfig:
    """Configuration of one experiment.

    Parameters
    ----------
    dataset : `DatasetSpec`
        Dataset.
    method : `Method`
        Method.
    train : `TrainConfig`, optional
        Training configuration of the implicit models and the baselines.
    elcm : `ElcmTrainConfig`, optional
        Training configuration of the explicit model.
    evaluation : `EvalOptions`, optional
        Evaluation options.
    seeds : `tuple` [`int`], optional
        Seeds of the runs. (the default is (0, 1, 2))
    output : `pathlib.Path`, optional
        Output directory. (the default is "output")
    name : `str`, optional
        Name of the experiment. (the default is the dataset family)
    """

    dataset: DatasetSpec
    method: Method
    train: TrainConfig = field(default_factory=TrainConfig)
    elcm: ElcmTrainConfig = field(default_factory=ElcmTrainConfig)
    evaluation: EvalOptions = field(default_factory=EvalOptions)
    seeds: tuple[int, ...] = (0, 1, 2)
    output: Path = Path("output")
    name: str = ""

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "method", Method(self.method))
        except ValueError:
            raise ConfigError(f"Unknown method: {self.method!r}.")

        object.__setattr__(self, "seeds", tuple(int(seed) for seed in self.seeds))
        object.__setattr__(self, "output", Path(self.output))
        if not self.name:
            object.__setattr__(self, "name", self.dataset.family.value)

        if len(self.seeds) == 0:
            raise ConfigError("At least one seed is required.")

        if self.method == Method.Elcm and self.dataset.n > MAX_ENUMERATION_SIZE:
            raise ConfigError(
                f"ELCM searches all graphs and supports n <= {MAX_ENUMERATION_SIZE}, got n={self.dataset.n}. "
                "Use the ilcm method instead."
            )

    @property
    def config_hash(self) -> str:
        """Hash of everything that determines the trained models, except the
        seeds and the output directory."""

        content = self.to_dict()
        for name in ("seeds", "output", "name"):
            content.pop(name)

        return compute_config_hash(content)

    @property
    def dataset_hash(self) -> str:
        return compute_config_hash(self.dataset.to_dict())

    @property
    def data_dir(self) -> Path:
        return self.output / "data"

    def run_dir(self, seed: int) -> Path:
        return self.output / "runs" / f"{self.method.value}_seed{seed}"

    def eval_dir(self, seed: int) -> Path:
        return self.output / "eval" / f"{self.method.value}_seed{seed}"

    def replace(self, **changes: typing.Any) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def with_full_scale(self) -> "ExperimentConfig":
        """Configuration with the full-scale training steps."""
        return self.replace(
            train=self.train.with_full_scale(self.dataset.family),
            elcm=self.elcm.with_full_scale(),
        )

    def to_dict(self) -> dict[str, typing.Any]:
        return {
            "name": self.name,
            "dataset": self.dataset.to_dict(),
            "method": self.method.value,
            "train": self.train.to_dict(),
            "elcm": self.elcm.to_dict(),
            "evaluation": dataclasses.asdict(self.evaluation),
            "seeds": list(self.seeds),
            "output": str(self.output),
        }

    @classmethod
    def from_dict(cls, content: dict[str, typing.Any]) -> "ExperimentConfig":
        """Create the configuration from a mapping.

        Raises
        ------
        `ConfigError`
            If a key is unknown, a required key is missing, or a value is
            invalid.
        """

        known = {"name", "dataset", "method", "train", "elcm", "evaluation", "seeds", "output"}
        unknown = set(content) - known
        if unknown:
            raise ConfigError(f"Unknown experiment keys: {sorted(unknown)}.")

        for name in ("dataset", "method"):
            if name not in content:
                raise ConfigError(f"Experiment key {name!r} is required.")

        try:
            return cls(
                dataset=DatasetSpec.from_dict(content["dataset"]),
                method=content["method"],
                train=TrainConfig.from_dict(content.get("train") or dict()),
                elcm=ElcmTrainConfig.from_dict(content.get("elcm") or dict()),
                evaluation=EvalOptions.from_dict(content.get("evaluation") or dict()),
                seeds=tuple(content.get("seeds", (0, 1, 2))),
                output=Path(content.get("output", "output")),
                name=str(content.get("name", "")),
            )
        except (TypeError, AttributeError) as error:
            raise ConfigError(f"Invalid experiment configuration: {error}.")


@dataclass
class RunRecord:
    """Record of one training run.

    Attributes
    ----------
    config_hash : `str`
        Hash of the experiment configuration.
    method : `str`
        Method.
    seed : `int`
        Seed.
    val_loss : `float`
        Validation loss.
    checkpoint : `str`
        Path of the checkpoint.
    trace : `str`
        Path of the loss trace.
    wall_time : `float`
        Training time in seconds.
    selected : `bool`
        The run is the median (implicit models and baselines) or the best
        (explicit model) by the validation loss.
    """

    config_hash: str
    method: str
    seed: int
    val_loss: float
    checkpoint: str
    trace: str
    wall_time: float
    selected: bool = False

    def to_dict(self) -> dict[str, typing.Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, content: dict[str, typing.Any]) -> "RunRecord":
        return cls(**content)


def load_experiment_config(
    filepath: str | Path,
    output: str | Path | None = None,
    full_scale: bool = False,
) -> ExperimentConfig:
    """Read the experiment configuration from a YAML or JSON file.

    A relative path that does not exist is looked up in the directory of the
    LCMKIT_CONFIG_DIR environment variable.

    Parameters
    ----------
    filepath : `str` or `pathlib.Path`
        Configuration file.
    output : `str`, `pathlib.Path`, or None, optional
        Output directory overriding the file. (the default is None)
    full_scale : `bool`, optional
        Use the full-scale training steps. (the default is False)

    Returns
    -------
    `ExperimentConfig`
        Configuration.
    """

    filepath = Path(filepath)
    if not filepath.is_absolute() and not filepath.exists():
        filepath = get_config_dir(str(filepath))

    config = ExperimentConfig.from_dict(read_yaml_file(filepath))
    if output is not None:
        config = config.replace(output=Path(output))

    return config.with_full_scale() if full_scale else config
