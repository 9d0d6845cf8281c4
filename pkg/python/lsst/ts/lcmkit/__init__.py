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

try:
    from .version import __version__
except ImportError:
    __version__ = "?"

from .cli import *
from .constants import *
from .container import *
from .datasets import *
from .diffnum import *
from .elcm import *
from .enums import *
from .errors import *
from .evaluation import *
from .graphinfer import *
from .ilcm import *
from .scm import *
from .transforms import *
from .utils import *
