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
import yaml
from lsst.ts.lcmkit import ConfigError, DatasetFamily, Method, get_default_config_path
from lsst.ts.lcmkit.cli import EvalOptions, ExperimentConfig, RunRecord, load_experiment_config
from lsst.ts.lcmkit.constants import SCALING_STEPS_FULL, TOY2D_STEPS_FULL


@pytest.fixture
def content() -> dict:
    return {
        "name": "tiny",
        "method": "ilcm",
        "dataset": {"family": "toy2d", "n_train": 100, "n_val": 50, "n_test": 50},
        "train": {"steps": [1, 1, 1, 1], "hidden": [4]},
        "seeds": [3, 4],
        "output": "somewhere",
    }


def test_load_experiment_config() -> None:
    config = load_experiment_config(get_default_config_path("toy2d.yaml"))

    assert config.name == "toy2d"
    assert config.method == Method.Ilcm
    assert config.dataset.family == DatasetFamily.Toy2D
    assert config.train.steps == (3000, 10000, 10000, 7000)
    assert config.seeds == (0, 1, 2)
    assert config.output == Path("output/toy2d")


def test_load_experiment_config_override(tmp_path: Path) -> None:
    config = load_experiment_config(get_default_config_path("scaling.yaml"), output=tmp_path, full_scale=True)

    assert config.output == tmp_path
    assert config.dataset.family == DatasetFamily.LinearScaling
    assert config.dataset.n == 4
    assert config.train.steps == SCALING_STEPS_FULL
    assert config.elcm.steps == 30000
    assert not config.train.fix_topological_order


def test_with_full_scale(content: dict) -> None:
    config = ExperimentConfig.from_dict(content).with_full_scale()

    assert config.train.steps == TOY2D_STEPS_FULL
    assert config.train.hidden == (4,)


def test_from_dict(content: dict) -> None:
    config = ExperimentConfig.from_dict(content)

    assert config.name == "tiny"
    assert config.train.steps == (1, 1, 1, 1)
    assert config.elcm.steps == 10000
    assert config.evaluation == EvalOptions()
    assert config.seeds == (3, 4)
    assert ExperimentConfig.from_dict(config.to_dict()) == config


def test_from_dict_default_name(content: dict) -> None:
    del content["name"]

    assert ExperimentConfig.from_dict(content).name == "toy2d"


@pytest.mark.parametrize(
    "changes",
    [
        {"colour": "red"},
        {"method": "pca"},
        {"seeds": []},
        {"train": {"steps": [1, 1]}},
        {"train": {"momentum": 0.9}},
        {"elcm": {"steps": -1}},
        {"evaluation": {"alpha": 2.0}},
        {"evaluation": {"p_min": 0.0}},
        {"dataset": {"family": "toy2d", "n": 3}},
    ],
)
def test_from_dict_exception(content: dict, changes: dict) -> None:
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({**content, **changes})


def test_from_dict_missing_key(content: dict) -> None:
    del content["dataset"]

    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(content)


def test_elcm_size_limit(content: dict) -> None:
    content["method"] = "elcm"
    content["dataset"] = {"family": "linear_scaling", "n": 4}

    assert ExperimentConfig.from_dict(content).method == Method.Elcm

    content["dataset"]["n"] = 5
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(content)


def test_config_hash(content: dict) -> None:
    config = ExperimentConfig.from_dict(content)

    assert config.replace(seeds=(7,), output=Path("elsewhere"), name="other").config_hash == config.config_hash
    assert config.replace(method=Method.Dvae).config_hash != config.config_hash
    assert config.replace(train=config.train.with_steps((2, 1, 1, 1))).config_hash != config.config_hash
    assert len(config.config_hash) == 16
    assert config.dataset_hash != config.config_hash


def test_paths(content: dict) -> None:
    config = ExperimentConfig.from_dict(content)

    assert config.data_dir == Path("somewhere/data")
    assert config.run_dir(3) == Path("somewhere/runs/ilcm_seed3")
    assert config.eval_dir(4) == Path("somewhere/eval/ilcm_seed4")


def test_eval_options_exception() -> None:
    with pytest.raises(ConfigError):
        EvalOptions(max_pairs=0)

    with pytest.raises(ConfigError):
        EvalOptions(traversal_points=1)

    with pytest.raises(ConfigError):
        EvalOptions.from_dict({"pairs": 10})


def test_run_record() -> None:
    record = RunRecord("abc", "ilcm", 1, 0.5, "runs/checkpoint.lcmc", "runs/trace.csv", 2.0)

    assert not record.selected
    assert RunRecord.from_dict(record.to_dict()) == record


def test_load_experiment_config_from_config_dir(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch, content: dict
) -> None:
    (tmp_path / "tiny.yaml").write_text(yaml.safe_dump(content))
    monkeypatch.setenv("LCMKIT_CONFIG_DIR", str(tmp_path))

    assert load_experiment_config("tiny.yaml").name == "tiny"
