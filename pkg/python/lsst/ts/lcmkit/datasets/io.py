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

__all__ = ["DATASET_KIND", "write_dataset", "read_dataset", "dataset_file_name"]

import logging
import typing
from pathlib import Path

import numpy as np

from ..container import read_container, write_container
from ..enums import FormatErrorCode, Split
from ..errors import DatasetFormatError
from ..scm import PairDataset
from .builders import DatasetSpec

log = logging.getLogger(__name__)

DATASET_KIND = "dataset"


def dataset_file_name(split: Split) -> str:
    """File name of the split, such as "train.lcmd"."""
    return f"{Split(split).value}.lcmd"


def write_dataset(
    path: str | Path,
    pairs: PairDataset,
    spec: DatasetSpec,
    extra: dict[str, typing.Any] | None = None,
) -> None:
    """Write the pairs and their ground truth.

    Parameters
    ----------
    path : `str` or `pathlib.Path`
        File path.
    pairs : `PairDataset`
        Pairs.
    spec : `DatasetSpec`
        Specification the pairs were generated from.
    extra : `dict` or None, optional
        Additional JSON serializable header fields, such as the split or the
        config hash. (the default is None)
    """

    header = {
        "kind": DATASET_KIND,
        "spec": spec.to_dict(),
        "num_pairs": len(pairs),
        "data_dim": pairs.data_dim,
        "has_truth": pairs.has_truth,
    }
    if extra is not None:
        header.update(extra)

    write_container(path, header, dict(pairs.arrays()))


def read_dataset(path: str | Path) -> tuple[PairDataset, DatasetSpec]:
    """Read the pairs written by `write_dataset`.

    Parameters
    ----------
    path : `str` or `pathlib.Path`
        File path.

    Returns
    -------
    pairs : `PairDataset`
        Pairs.
    spec : `DatasetSpec`
        Specification.

    Raises
    ------
    `DatasetFormatError`
        If the file is not a valid dataset file.
    """

    header, blocks = read_container(path)
    if header.get("kind") != DATASET_KIND:
        raise DatasetFormatError(FormatErrorCode.BadMagic, f"{path} is not a dataset file.")

    targets = blocks.pop("targets", None)
    pairs = PairDataset(
        targets=None if targets is None else targets.astype(np.int64),
        **blocks,
    )

    log.debug("Read %d pairs from %s.", len(pairs), path)

    return pairs, DatasetSpec.from_dict(header["spec"])
