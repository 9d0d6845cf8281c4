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

__all__ = ["ILCM_CHECKPOINT_KIND", "IlcmCheckpoint", "save_checkpoint", "load_checkpoint"]

import typing
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..container import read_container, write_container
from ..enums import FormatErrorCode
from ..errors import DatasetFormatError
from ..utils import make_rng
from .config import TrainConfig
from .model import IlcmModel

ILCM_CHECKPOINT_KIND = "ilcm_checkpoint"

_OPTIMIZER_PREFIX = "adam."


@dataclass
class IlcmCheckpoint:
    """Snapshot of a model and its training state."""

    model: IlcmModel
    config: TrainConfig
    step: int
    optimizer_state: dict[str, np.ndarray] = field(default_factory=dict)
    header: dict[str, typing.Any] = field(default_factory=dict)


def save_checkpoint(
    path: str | Path,
    model: IlcmModel,
    config: TrainConfig,
    step: int,
    optimizer_state: dict[str, np.ndarray] | None = None,
    extra: dict[str, typing.Any] | None = None,
) -> None:
    """Save the model, the configuration, and the optimizer state.

    Parameters
    ----------
    path : `str` or `pathlib.Path`
        File path.
    model : `IlcmModel`
        Model.
    config : `TrainConfig`
        Training configuration.
    step : `int`
        Global step count.
    optimizer_state : `dict` or None, optional
        Optimizer state. (the default is None)
    extra : `dict` or None, optional
        Additional header fields. (the default is None)
    """

    header = {
        "kind": ILCM_CHECKPOINT_KIND,
        "model": model.config_dict(),
        "train": config.to_dict(),
        "step": int(step),
        "phase": config.phase_at(max(step - 1, 0)),
    }
    if extra is not None:
        header.update(extra)

    blocks = model.state_dict()
    if optimizer_state:
        blocks.update(optimizer_state)

    write_container(path, header, blocks)


def load_checkpoint(path: str | Path) -> IlcmCheckpoint:
    """Load the output of `save_checkpoint`.

    Parameters
    ----------
    path : `str` or `pathlib.Path`
        File path.

    Returns
    -------
    `IlcmCheckpoint`
        Checkpoint.

    Raises
    ------
    `DatasetFormatError`
        If the file is not an ILCM checkpoint.
    """

    header, blocks = read_container(path)
    if header.get("kind") != ILCM_CHECKPOINT_KIND:
        raise DatasetFormatError(FormatErrorCode.BadMagic, f"{path} is not an ILCM checkpoint.")

    model_config = dict(header["model"])
    model = IlcmModel(
        model_config.pop("n"),
        model_config.pop("data_dim"),
        make_rng(0),
        **model_config,
    )
    model.load_state_dict(blocks)

    optimizer_state = {name: value for name, value in blocks.items() if name.startswith(_OPTIMIZER_PREFIX)}

    return IlcmCheckpoint(
        model=model,
        config=TrainConfig.from_dict(header["train"]),
        step=int(header["step"]),
        optimizer_state=optimizer_state,
        header=header,
    )
