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

import pytest
from lsst.ts.lcmkit import ReproduceTable
from lsst.ts.lcmkit.cli import cmd_reproduce


@pytest.mark.slow
def test_reproduce_toy_comparison(tmp_path: Path) -> None:
    report = cmd_reproduce(ReproduceTable.ToyComparison, tmp_path, workers=3)

    assert report.complete
    assert report.passed, report.format()
    assert len(report.checks) == 8
    for method in ("ilcm", "dvae", "beta_vae"):
        assert (tmp_path / "toy" / method / "eval" / "metrics.csv").exists()


@pytest.mark.slow
def test_reproduce_scaling_sweep(tmp_path: Path) -> None:
    report = cmd_reproduce(ReproduceTable.ScalingSweep, tmp_path, workers=3)

    assert report.passed, report.format()
    assert (tmp_path / "scaling.csv").exists()
    assert [row["runs"] for row in report.rows] == [9, 9, 9, 9]
    assert (tmp_path / "scaling" / "n4" / "data2" / "eval" / "metrics.csv").exists()
