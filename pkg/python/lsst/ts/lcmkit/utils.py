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

__all__ = [
    "read_yaml_file",
    "get_config_dir",
    "get_default_config_path",
    "get_num_workers",
    "run_in_workers",
    "run_in_workers_sync",
    "compute_config_hash",
    "make_rng",
    "spawn_rngs",
]

import asyncio
import hashlib
import json
import logging
import typing
from importlib import resources
from os import getenv
from pathlib import Path

import numpy as np
import yaml

from .constants import ENV_CONFIG_DIR, ENV_WORKERS
from .errors import ConfigError

log = logging.getLogger(__name__)


def read_yaml_file(filepath: str | Path) -> dict:
    """Read the yaml file.

    JSON files are also accepted because JSON is a subset of YAML.

    Parameters
    ----------
    filepath : `str` or `pathlib.PosixPath`
        Yaml file path.

    Returns
    -------
    content : `dict`
        File content.

    Raises
    ------
    `IOError`
        Cannot open the file.
    `ConfigError`
        The content is not a mapping.
    """

    try:
        with open(filepath, "r") as yaml_file:
            content = yaml.safe_load(yaml_file)
    except IOError:
        raise IOError(f"Cannot open the yaml file: {filepath}.")

    if content is None:
        return dict()

    if not isinstance(content, dict):
        raise ConfigError(f"The content of {filepath} is not a mapping.")

    return content


def get_config_dir(
    relative_path: str,
    env_variable: str = ENV_CONFIG_DIR,
) -> Path:
    """Get the directory of configuration files.

    Parameters
    ----------
    relative_path : `str`
        Relative path to the path assigned by "env_variable".
    env_variable : `str`, optional
        Environment variable of the configuration directory. (the default is
        "LCMKIT_CONFIG_DIR")

    Returns
    -------
    `pathlib.PosixPath`
        Path of the configuration directory.
    """
    return Path(getenv(env_variable, default="")) / relative_path


def get_default_config_path(name: str) -> Path:
    """Get the path of a configuration file shipped with the package.

    Parameters
    ----------
    name : `str`
        File name, such as "toy2d.yaml".

    Returns
    -------
    `pathlib.PosixPath`
        Path of the configuration file.
    """
    return Path(str(resources.files("lsst.ts.lcmkit").joinpath("data", name)))


def get_num_workers(workers: int = 1, env_variable: str = ENV_WORKERS) -> int:
    """Get the number of workers.

    The environment variable overrides the value from the command line.

    Parameters
    ----------
    workers : `int`, optional
        Number of workers from the command line. (the default is 1)
    env_variable : `str`, optional
        Environment variable. (the default is "LCMKIT_WORKERS")

    Returns
    -------
    `int`
        Number of workers.

    Raises
    ------
    `ConfigError`
        If the number of workers is not a positive integer.
    """

    value = getenv(env_variable, default="")
    if value != "":
        try:
            workers = int(value)
        except ValueError:
            raise ConfigError(f"{env_variable} should be an integer, got {value!r}.")

    if workers < 1:
        raise ConfigError(f"Number of workers should be >= 1, got {workers}.")

    return workers


async def run_in_workers(
    functions: typing.Sequence[typing.Callable[[], typing.Any]],
    workers: int = 1,
) -> list[typing.Any]:
    """Run the blocking functions in worker threads.

    Parameters
    ----------
    functions : `list` [`func`]
        Functions without arguments.
    workers : `int`, optional
        Maximum number of functions running at the same time. If 1, the
        functions run one after another in the event loop thread. (the
        default is 1)

    Returns
    -------
    `list`
        Results in the order of the functions.
    """

    if workers == 1:
        return [function() for function in functions]

    semaphore = asyncio.Semaphore(workers)

    async def _run(function: typing.Callable[[], typing.Any]) -> typing.Any:
        async with semaphore:
            return await asyncio.to_thread(function)

    return list(await asyncio.gather(*[_run(function) for function in functions]))


def run_in_workers_sync(
    functions: typing.Sequence[typing.Callable[[], typing.Any]],
    workers: int = 1,
) -> list[typing.Any]:
    """Synchronous wrapper of `run_in_workers`.

    Parameters
    ----------
    functions : `list` [`func`]
        Functions without arguments.
    workers : `int`, optional
        Maximum number of functions running at the same time. (the default is
        1)

    Returns
    -------
    `list`
        Results in the order of the functions.
    """
    return asyncio.run(run_in_workers(functions, workers=workers))


def compute_config_hash(config: dict[str, typing.Any]) -> str:
    """Compute the hash of a configuration.

    Parameters
    ----------
    config : `dict`
        JSON serializable configuration.

    Returns
    -------
    `str`
        First 16 hexadecimal digits of the SHA-256 of the canonical JSON.
    """

    text = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def make_rng(seed: int | None) -> np.random.Generator:
    """Make the random number generator.

    Parameters
    ----------
    seed : `int` or None
        Seed.

    Returns
    -------
    `numpy.random.Generator`
        Random number generator.
    """
    return np.random.default_rng(seed)


def spawn_rngs(seed: int, number: int) -> list[np.random.Generator]:
    """Spawn independent random number generators from one seed.

    Parameters
    ----------
    seed : `int`
        Seed.
    number : `int`
        Number of generators.

    Returns
    -------
    `list` [`numpy.random.Generator`]
        Independent generators.
    """
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(number)]
