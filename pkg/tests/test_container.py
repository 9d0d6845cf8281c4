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

from pathlib import Path

import numpy as np
import pytest
from lsst.ts.lcmkit import (
    DatasetFormatError,
    FormatErrorCode,
    read_container,
    read_container_header,
    write_container,
)


@pytest.fixture
def container_path(tmp_path: Path) -> Path:
    path = tmp_path / "blocks.lcmd"
    write_container(
        path,
        {"kind": "test", "value": 1},
        {"a": np.arange(6.0).reshape(2, 3), "b": np.array([0.5, -1.5])},
    )

    return path


def test_write_container_exception(tmp_path: Path) -> None:
    with pytest.raises(ValueError):
        write_container(tmp_path / "bad.lcmd", {"blocks": list()}, dict())


def test_read_container(container_path: Path) -> None:
    header, blocks = read_container(container_path)

    assert header == {"kind": "test", "value": 1}
    assert np.array_equal(blocks["a"], np.arange(6.0).reshape(2, 3))
    assert np.array_equal(blocks["b"], np.array([0.5, -1.5]))


def test_read_container_header(container_path: Path) -> None:
    header = read_container_header(container_path)

    assert header["kind"] == "test"
    assert [block["name"] for block in header["blocks"]] == ["a", "b"]
    assert header["blocks"][0]["shape"] == [2, 3]


def test_write_container_deterministic(tmp_path: Path) -> None:
    blocks = {"a": np.linspace(0.0, 1.0, 7)}
    write_container(tmp_path / "first.lcmd", {"seed": 3}, blocks)
    write_container(tmp_path / "second.lcmd", {"seed": 3}, blocks)

    assert (tmp_path / "first.lcmd").read_bytes() == (tmp_path / "second.lcmd").read_bytes()


def test_read_container_bad_magic(container_path: Path) -> None:
    content = bytearray(container_path.read_bytes())
    content[:4] = b"XXXX"
    container_path.write_bytes(bytes(content))

    with pytest.raises(DatasetFormatError) as error:
        read_container(container_path)

    assert error.value.code == FormatErrorCode.BadMagic


def test_read_container_version_mismatch(container_path: Path) -> None:
    content = bytearray(container_path.read_bytes())
    content[4] = 99
    container_path.write_bytes(bytes(content))

    with pytest.raises(DatasetFormatError) as error:
        read_container(container_path)

    assert error.value.code == FormatErrorCode.VersionMismatch


def test_read_container_truncated(container_path: Path) -> None:
    content = container_path.read_bytes()
    container_path.write_bytes(content[:-10])

    with pytest.raises(DatasetFormatError) as error:
        read_container(container_path)

    assert error.value.code == FormatErrorCode.Truncated

    container_path.write_bytes(content[:6])
    with pytest.raises(DatasetFormatError) as error:
        read_container(container_path)

    assert error.value.code == FormatErrorCode.Truncated


def test_read_container_checksum(container_path: Path) -> None:
    content = bytearray(container_path.read_bytes())

    # Flip a bit inside the last float64 block
    content[-6] ^= 0x01
    container_path.write_bytes(bytes(content))

    with pytest.raises(DatasetFormatError) as error:
        read_container(container_path)

    assert error.value.code == FormatErrorCode.Checksum
    assert isinstance(error.value, IOError)
