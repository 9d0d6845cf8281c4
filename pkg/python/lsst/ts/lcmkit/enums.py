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
    "ExitCode",
    "FormatErrorCode",
    "Method",
    "DatasetFamily",
    "Split",
    "MechanismKind",
    "ReproduceTable",
]


from enum import Enum, IntEnum, auto


class ExitCode(IntEnum):
    """Exit code of the command line interface."""

    Ok = 0
    ConfigError = 2
    NumericDivergence = 3
    IOError = 4


class FormatErrorCode(IntEnum):
    """Error code of the binary container."""

    BadMagic = 1
    VersionMismatch = auto()
    Truncated = auto()
    Checksum = auto()


class Method(str, Enum):
    """Representation learning method."""

    Ilcm = "ilcm"
    Elcm = "elcm"
    Dvae = "dvae"
    BetaVae = "beta_vae"


class DatasetFamily(str, Enum):
    """Family of the synthetic dataset."""

    Toy2D = "toy2d"
    LinearScaling = "linear_scaling"


class Split(str, Enum):
    """Dataset split."""

    Train = "train"
    Val = "val"
    Test = "test"


class MechanismKind(str, Enum):
    """Kind of the causal mechanism."""

    LinearAdditive = "linear_additive"
    AffineConditional = "affine_conditional"
    Fixed2DToy = "fixed_2d_toy"
    Monotone = "monotone"


class ReproduceTable(str, Enum):
    """Experiment reproduced by the reproduce command."""

    ToyComparison = "table1_rows_toy"
    ScalingSweep = "fig7_small"
