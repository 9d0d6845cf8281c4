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

__all__ = ["ELCM_CHECKPOINT_KIND", "save_elcm_checkpoint", "load_elcm_checkpoint"]

import typing
from pathlib import Path

from ..container import read_container, write_container
from ..enums import FormatErrorCode
from ..errors import DatasetFormatError
from ..scm import Dag
from ..utils import make_rng
from .config import ElcmTrainConfig
from .model import ElcmModel

ELCM_CHECKPOINT_KIND = "elcm_checkpoint"


def save_elcm_checkpoint(
    path: str | Path,
    model: ElcmModel,
    config: ElcmTrainConfig,
    extra: dict[str, typing.Any] | None = None,
) -> None:
    """Save the model with its graph in the header.

    Parameters
    ----------
    path : `str` or `pathlib.Path`
        File path.
    model : `ElcmModel`
        Model.
    config : `ElcmTrainConfig`
        Training configuration.
    extra : `dict` or None, optional
        Additional header fields. (the default is None)
    """

    header = {
        "kind": ELCM_CHECKPOINT_KIND,
        "model": model.config_dict(),
        "train": config.to_dict(),
        "step": config.steps,
    }
    if extra is not None:
        header.update(extra)

    write_container(path, header, model.state_dict())


def load_elcm_checkpoint(path: str | Path) -> tuple[ElcmModel, ElcmTrainConfig, dict[str, typing.Any]]:
    """Load the output of `save_elcm_checkpoint`.

    Parameters
    ----------
    path : `str` or `pathlib.Path`
        File path.

    Returns
    -------
    model : `ElcmModel`
        Model.
    config : `ElcmTrainConfig`
        Training configuration.
    header : `dict`
        Header.

    Raises
    ------
    `DatasetFormatError`
        If the file is not an ELCM checkpoint.
    """

    header, blocks = read_container(path)
    if header.get("kind") != ELCM_CHECKPOINT_KIND:
        raise DatasetFormatError(FormatErrorCode.BadMagic, f"{path} is not an ELCM checkpoint.")

    model_config = dict(header["model"])
    model = ElcmModel(
        Dag(model_config.pop("dag")),
        model_config.pop("data_dim"),
        make_rng(0),
        **model_config,
    )
    model.load_state_dict(blocks)

    return model, ElcmTrainConfig.from_dict(header["train"]), header
