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

__all__ = ["MAGIC", "CONTAINER_VERSION", "write_container", "read_container", "read_container_header"]

import json
import logging
import struct
import typing
import zlib
from pathlib import Path

import numpy as np

from .enums import FormatErrorCode
from .errors import DatasetFormatError

log = logging.getLogger(__name__)

MAGIC = b"LCMD"
CONTAINER_VERSION = 1

# Magic, version, header length
_PREAMBLE = struct.Struct("<4sII")
_FOOTER = struct.Struct("<I")


def _encode(header: dict[str, typing.Any], blocks: dict[str, np.ndarray]) -> bytes:
    layout = list()
    payload = list()
    for name, block in blocks.items():
        data = np.ascontiguousarray(block, dtype="<f8")
        raw = data.tobytes()
        layout.append({"name": name, "shape": list(data.shape), "crc32": zlib.crc32(raw)})
        payload.append(raw)

    full_header = dict(header, blocks=layout)
    header_bytes = json.dumps(full_header, sort_keys=True, separators=(",", ":")).encode("utf-8")

    body = _PREAMBLE.pack(MAGIC, CONTAINER_VERSION, len(header_bytes)) + header_bytes + b"".join(payload)
    return body + _FOOTER.pack(zlib.crc32(body))


def write_container(
    path: str | Path,
    header: dict[str, typing.Any],
    blocks: dict[str, np.ndarray],
) -> None:
    """Write the versioned binary container.

    The layout is the magic bytes "LCMD", the format version (u32), the
    length of the JSON header (u32), the JSON header, the little-endian
    float64 blocks in the header order, and the CRC32 of everything before
    the footer (u32).

    Parameters
    ----------
    path : `str` or `pathlib.Path`
        File path.
    header : `dict`
        JSON serializable metadata. The key "blocks" is reserved.
    blocks : `dict` [`str`, `numpy.ndarray`]
        Named arrays. They are stored as float64.
    """

    if "blocks" in header:
        raise ValueError("The header key 'blocks' is reserved.")

    content = _encode(header, blocks)

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(content)

    log.debug("Wrote %d blocks (%d bytes) to %s.", len(blocks), len(content), path)


def _decode_header(content: bytes, path: Path) -> tuple[dict[str, typing.Any], int]:
    if len(content) < _PREAMBLE.size:
        raise DatasetFormatError(FormatErrorCode.Truncated, f"{path} is shorter than the preamble.")

    magic, version, header_length = _PREAMBLE.unpack_from(content)
    if magic != MAGIC:
        raise DatasetFormatError(FormatErrorCode.BadMagic, f"{path} does not start with {MAGIC!r}.")

    if version != CONTAINER_VERSION:
        raise DatasetFormatError(
            FormatErrorCode.VersionMismatch,
            f"{path} has the version {version}, expect {CONTAINER_VERSION}.",
        )

    offset = _PREAMBLE.size + header_length
    if len(content) < offset:
        raise DatasetFormatError(FormatErrorCode.Truncated, f"Header of {path} is truncated.")

    try:
        header = json.loads(content[_PREAMBLE.size : offset].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as error:
        raise DatasetFormatError(FormatErrorCode.Checksum, f"Header of {path} is corrupted: {error}.")

    return header, offset


def read_container_header(path: str | Path) -> dict[str, typing.Any]:
    """Read only the JSON header of the container.

    Parameters
    ----------
    path : `str` or `pathlib.Path`
        File path.

    Returns
    -------
    `dict`
        Header including the block layout.

    Raises
    ------
    `DatasetFormatError`
        If the preamble or the header can not be decoded.
    """

    path = Path(path)
    header, _ = _decode_header(path.read_bytes(), path)
    return header


def read_container(path: str | Path) -> tuple[dict[str, typing.Any], dict[str, np.ndarray]]:
    """Read the versioned binary container.

    Parameters
    ----------
    path : `str` or `pathlib.Path`
        File path.

    Returns
    -------
    header : `dict`
        Metadata without the block layout.
    blocks : `dict` [`str`, `numpy.ndarray`]
        Named arrays.

    Raises
    ------
    `DatasetFormatError`
        If the magic bytes or the version are wrong, the file is truncated,
        or a checksum does not match. Nothing is returned in these cases.
    """

    path = Path(path)
    content = path.read_bytes()
    header, offset = _decode_header(content, path)

    layout = header.pop("blocks", list())
    sizes = [8 * int(np.prod(block["shape"], dtype=np.int64)) for block in layout]

    expected = offset + sum(sizes) + _FOOTER.size
    if len(content) < expected:
        raise DatasetFormatError(
            FormatErrorCode.Truncated,
            f"{path} has {len(content)} bytes, expect {expected}.",
        )

    if len(content) > expected:
        raise DatasetFormatError(FormatErrorCode.Checksum, f"{path} has trailing bytes.")

    (footer,) = _FOOTER.unpack_from(content, expected - _FOOTER.size)
    if footer != zlib.crc32(content[: expected - _FOOTER.size]):
        raise DatasetFormatError(FormatErrorCode.Checksum, f"Footer checksum of {path} does not match.")

    blocks = dict()
    for block, size in zip(layout, sizes):
        raw = content[offset : offset + size]
        if zlib.crc32(raw) != block["crc32"]:
            raise DatasetFormatError(FormatErrorCode.Checksum, f"Block {block['name']!r} of {path} is corrupted.")

        blocks[block["name"]] = np.frombuffer(raw, dtype="<f8").astype(np.float64).reshape(block["shape"])
        offset += size

    return header, blocks
