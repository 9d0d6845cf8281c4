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
    "LcmkitError",
    "DimensionError",
    "ContractError",
    "DomainError",
    "NumericalError",
    "NumericalDivergenceError",
    "DatasetFormatError",
    "GraphSearchError",
    "InsufficientDataError",
    "ConfigError",
]

import typing

from .enums import ExitCode, FormatErrorCode


class LcmkitError(Exception):
    """Base class of the errors raised by this package.

    Attributes
    ----------
    exit_code : `ExitCode`
        Exit code used by the command line interface.
    """

    exit_code = ExitCode.ConfigError


class DimensionError(LcmkitError, ValueError):
    """Shape of an input does not match what the operation expects."""


class ContractError(LcmkitError, ValueError):
    """A precondition of the operation is violated."""


class DomainError(LcmkitError, ValueError):
    """A value is outside of the domain of the operation."""


class NumericalError(LcmkitError, ArithmeticError):
    """Numerical failure at a specific causal variable.

    Parameters
    ----------
    message : `str`
        Message.
    index : `int` or None, optional
        Index of the variable. (the default is None)
    """

    exit_code = ExitCode.NumericDivergence

    def __init__(self, message: str, index: int | None = None) -> None:
        super().__init__(message if index is None else f"{message} (variable {index})")
        self.index = index


class NumericalDivergenceError(LcmkitError, RuntimeError):
    """Training diverged.

    Parameters
    ----------
    message : `str`
        Message.
    diagnostics : `dict` or None, optional
        Diagnostics at the failing step. (the default is None)
    trace : `list` [`dict`] or None, optional
        Loss trace recorded before the failure. (the default is None)
    """

    exit_code = ExitCode.NumericDivergence

    def __init__(
        self,
        message: str,
        diagnostics: dict[str, typing.Any] | None = None,
        trace: list[dict[str, typing.Any]] | None = None,
    ) -> None:
        super().__init__(message)
        self.diagnostics = diagnostics if diagnostics is not None else dict()
        self.trace = trace if trace is not None else list()


class DatasetFormatError(LcmkitError, IOError):
    """The binary container can not be decoded.

    Parameters
    ----------
    code : `FormatErrorCode`
        Error code.
    message : `str`
        Message.
    """

    exit_code = ExitCode.IOError

    def __init__(self, code: FormatErrorCode, message: str) -> None:
        super().__init__(f"[{code.name}] {message}")
        self.code = code


class GraphSearchError(LcmkitError, ValueError):
    """The exhaustive graph search is refused."""


class InsufficientDataError(LcmkitError, ValueError):
    """Too few samples for a statistical procedure."""


class ConfigError(LcmkitError, ValueError):
    """The configuration is invalid."""
