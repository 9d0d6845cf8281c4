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

__all__ = ["build_parser", "main"]

import argparse
import json
import logging
import typing

from ..constants import LOG_LEVEL_MAXIMUM, LOG_LEVEL_MINIMUM
from ..enums import ExitCode, ReproduceTable
from ..errors import ConfigError, LcmkitError, NumericalDivergenceError
from ..utils import get_num_workers
from .config import ExperimentConfig, load_experiment_config
from .runner import cmd_eval, cmd_generate, cmd_inspect_checkpoint, cmd_reproduce, cmd_train

log = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    """Build the parser of the command line."""

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Experiment configuration file (YAML or JSON).")
    common.add_argument(
        "--seed",
        type=int,
        action="append",
        help="Seed of a run; repeat for several runs. Overrides the seeds of the configuration.",
    )
    common.add_argument("--out", help="Output directory. Overrides the output of the configuration.")
    common.add_argument("--force", action="store_true", help="Overwrite existing dataset files.")
    common.add_argument(
        "--workers",
        type=int,
        default=1,
        help="Number of runs at the same time. The LCMKIT_WORKERS environment variable overrides it.",
    )
    common.add_argument(
        "--paper-scale",
        dest="full_scale",
        action="store_true",
        help="Use the full-scale training steps.",
    )
    common.add_argument(
        "--log-level",
        type=int,
        default=logging.INFO,
        help=f"Log level between {LOG_LEVEL_MINIMUM} and {LOG_LEVEL_MAXIMUM}.",
    )

    parser = argparse.ArgumentParser(
        prog="lcmkit",
        description="Weakly supervised causal representation learning experiments.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("generate", parents=[common], help="Generate the dataset splits.")

    train = commands.add_parser("train", parents=[common], help="Train one model per seed.")
    train.add_argument("--resume", action="store_true", help="Continue from the existing checkpoints.")

    evaluate = commands.add_parser("eval", parents=[common], help="Evaluate the trained runs.")
    evaluate.add_argument(
        "--ignore-hash",
        action="store_true",
        help="Evaluate checkpoints trained with another configuration.",
    )

    reproduce = commands.add_parser("reproduce", parents=[common], help="Reproduce an experiment end to end.")
    reproduce.add_argument("table", choices=[item.value for item in ReproduceTable])
    reproduce.add_argument("--budget-minutes", type=float, help="Compute budget in minutes.")

    inspect = commands.add_parser("inspect-checkpoint", parents=[common], help="Print the header of a file.")
    inspect.add_argument("path")

    return parser


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    if args.config is None:
        raise ConfigError(f"The {args.command} command needs --config.")

    config = load_experiment_config(args.config, output=args.out, full_scale=args.full_scale)
    if args.seed:
        config = config.replace(seeds=tuple(args.seed))

    return config


def _run(args: argparse.Namespace) -> None:
    if args.command == "inspect-checkpoint":
        print(json.dumps(cmd_inspect_checkpoint(args.path), indent=2, sort_keys=True))
        return

    workers = get_num_workers(args.workers)
    if args.command == "reproduce":
        report = cmd_reproduce(
            args.table,
            args.out or "output",
            seeds=args.seed,
            workers=workers,
            full_scale=args.full_scale,
            budget_minutes=args.budget_minutes,
        )
        print(report.format())
        return

    config = _load_config(args)
    if args.command == "generate":
        for path in cmd_generate(config, force=args.force):
            print(path)

    elif args.command == "train":
        for record in cmd_train(config, workers=workers, resume=args.resume):
            print(json.dumps(record.to_dict(), sort_keys=True))

    elif args.command == "eval":
        for metrics in cmd_eval(config, workers=workers, ignore_hash=args.ignore_hash):
            print(json.dumps(metrics.to_dict(), sort_keys=True))


def main(argv: typing.Sequence[str] | None = None) -> int:
    """Run the command line interface.

    Parameters
    ----------
    argv : `list` [`str`] or None, optional
        Arguments. If None, the arguments of the process. (the default is
        None)

    Returns
    -------
    `int`
        Exit code: 0 on success, 2 for a configuration error, 3 for a
        numerical divergence, and 4 for an I/O error.
    """

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as error:
        return int(error.code or 0)

    if not LOG_LEVEL_MINIMUM <= args.log_level <= LOG_LEVEL_MAXIMUM:
        print(f"Log level should be in [{LOG_LEVEL_MINIMUM}, {LOG_LEVEL_MAXIMUM}], got {args.log_level}.")
        return int(ExitCode.ConfigError)

    logging.basicConfig(level=args.log_level, format="%(asctime)s %(name)s %(levelname)s: %(message)s")

    try:
        _run(args)
    except NumericalDivergenceError as error:
        log.error("%s Diagnostics: %s", error, error.diagnostics)
        return int(error.exit_code)
    except LcmkitError as error:
        log.error("%s", error)
        return int(error.exit_code)
    except OSError as error:
        log.error("%s", error)
        return int(ExitCode.IOError)

    return int(ExitCode.Ok)
