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
    "ReproduceReport",
    "cmd_generate",
    "cmd_train",
    "cmd_eval",
    "cmd_reproduce",
    "toy_comparison_checks",
    "summarize_scaling",
    "cmd_inspect_checkpoint",
    "select_runs",
    "load_split",
]

import dataclasses
import json
import logging
import time
import typing
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from ..container import read_container_header
from ..datasets import build_ground_truth, dataset_file_name, generate_dataset, read_dataset, write_dataset
from ..elcm import (
    ELCM_CHECKPOINT_KIND,
    exhaustive_graph_search,
    infer_elcm_interventions,
    load_elcm_checkpoint,
    save_elcm_checkpoint,
)
from ..enums import DatasetFamily, Method, ReproduceTable, Split
from ..errors import ConfigError, ContractError, DimensionError, InsufficientDataError, NumericalDivergenceError
from ..evaluation import MetricsRecord, evaluate_representation
from ..graphinfer import discover_interventional, infer_graph_heuristic
from ..ilcm import (
    beta_vae_variant,
    create_model,
    encode_intervention,
    latent_traversal,
    latents_to_causal,
    load_checkpoint,
    save_checkpoint,
    train,
    validation_loss,
)
from ..scm import PairDataset
from ..utils import get_default_config_path, run_in_workers_sync
from .config import ExperimentConfig, RunRecord, load_experiment_config

log = logging.getLogger(__name__)

CHECKPOINT_NAME = "checkpoint.lcmc"
TRACE_NAME = "trace.csv"
RUNS_NAME = "runs.json"

# Acceptance thresholds (disentanglement, accuracy) at the full and CI scales
TOY_THRESHOLDS_FULL = (0.95, 0.9)
TOY_THRESHOLDS_CI = (0.9, 0.85)
# The baselines reach the accuracy but not the disentanglement
BASELINE_ACCURACY = 0.9
BASELINE_DISENTANGLEMENT_MAXIMUM = 0.7
SCALING_DISENTANGLEMENT = 0.9
SCALING_SHD_MAXIMUM = 1.0
SCALING_SIZES = (2, 4, 6, 8)
SCALING_CHECKED_MAXIMUM = 6
SCALING_SHD_CHECKED_MAXIMUM = 4
# Datasets per size, seeded from the dataset seed of the configuration
SCALING_DATASETS = 3


def _write_json(path: Path, content: typing.Any) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(content, indent=2, sort_keys=True))


def _write_csv(path: Path, frame: pd.DataFrame, config_hash: str) -> None:
    """Write a table with the configuration hash on every row."""
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.assign(config_hash=config_hash).to_csv(path, index=False)


def load_split(config: ExperimentConfig, split: Split) -> PairDataset:
    """Read a generated split and check it against the configuration.

    Raises
    ------
    `FileNotFoundError`
        If the split has not been generated.
    `ConfigError`
        If the split was generated from another dataset specification.
    """

    path = config.data_dir / dataset_file_name(split)
    if not path.exists():
        raise FileNotFoundError(f"Missing dataset file {path}; run the generate command first.")

    pairs, spec = read_dataset(path)
    if spec != config.dataset:
        raise ConfigError(f"{path} was generated from another dataset specification.")

    return pairs


def cmd_generate(config: ExperimentConfig, force: bool = False) -> list[Path]:
    """Generate and write the train, validation, and test splits.

    Parameters
    ----------
    config : `ExperimentConfig`
        Experiment configuration.
    force : `bool`, optional
        Overwrite existing files. (the default is False)

    Returns
    -------
    `list` [`pathlib.Path`]
        Written files.

    Raises
    ------
    `FileExistsError`
        If a file exists and force is False.
    """

    paths = [config.data_dir / dataset_file_name(split) for split in Split]
    existing = [str(path) for path in paths if path.exists()]
    if existing and not force:
        raise FileExistsError(f"Dataset files exist: {existing}. Use --force to overwrite them.")

    generated = generate_dataset(config.dataset)
    for split, path in zip(Split, paths):
        write_dataset(
            path,
            generated.splits[split],
            config.dataset,
            extra={"split": split.value, "config_hash": config.dataset_hash},
        )
        log.info("Wrote %d %s pairs to %s.", config.dataset.size(split), split.value, path)

    return paths


def _train_implicit(
    config: ExperimentConfig,
    seed: int,
    train_pairs: PairDataset,
    val_pairs: PairDataset,
    resume: bool,
) -> RunRecord:
    run_dir = config.run_dir(seed)
    run_dir.mkdir(parents=True, exist_ok=True)
    checkpoint_path = run_dir / CHECKPOINT_NAME
    trace_path = run_dir / TRACE_NAME

    train_config = dataclasses.replace(config.train, seed=seed)
    if config.method == Method.BetaVae:
        train_config = beta_vae_variant(train_config)

    start_step = 0
    optimizer_state = None
    if resume and checkpoint_path.exists():
        checkpoint = load_checkpoint(checkpoint_path)
        model = checkpoint.model
        start_step = checkpoint.step
        optimizer_state = checkpoint.optimizer_state
        log.info("Resuming seed %d from step %d.", seed, start_step)
    else:
        model = create_model(
            config.dataset.n,
            train_pairs.data_dim,
            train_config,
            trivial_graph=config.method == Method.Dvae,
        )

    start = time.monotonic()
    try:
        result = train(model, train_pairs, train_config, start_step=start_step, optimizer_state=optimizer_state)
    except NumericalDivergenceError as error:
        _write_csv(trace_path, pd.DataFrame(error.trace), config.config_hash)
        raise

    wall_time = time.monotonic() - start
    frame = result.trace_frame()
    if start_step > 0 and trace_path.exists():
        previous = pd.read_csv(trace_path)
        previous = previous[previous["step"] < start_step]
        frame = pd.concat([previous, frame], ignore_index=True) if len(frame) > 0 else previous
    _write_csv(trace_path, frame, config.config_hash)
    save_checkpoint(
        checkpoint_path,
        result.model,
        train_config,
        result.step,
        optimizer_state=result.optimizer_state,
        extra={"config_hash": config.config_hash, "method": config.method.value, "seed": seed},
    )

    return RunRecord(
        config_hash=config.config_hash,
        method=config.method.value,
        seed=seed,
        val_loss=validation_loss(result.model, val_pairs, train_config),
        checkpoint=str(checkpoint_path),
        trace=str(trace_path),
        wall_time=wall_time,
    )


def _train_explicit(
    config: ExperimentConfig,
    seed: int,
    train_pairs: PairDataset,
    val_pairs: PairDataset,
) -> RunRecord:
    run_dir = config.run_dir(seed)
    run_dir.mkdir(parents=True, exist_ok=True)

    elcm_config = dataclasses.replace(config.elcm, seed=seed)
    start = time.monotonic()
    search = exhaustive_graph_search(train_pairs, config.dataset.n, elcm_config, val_dataset=val_pairs)
    wall_time = time.monotonic() - start

    best = search.results[search.selected_index]
    trace_path = run_dir / TRACE_NAME
    _write_csv(trace_path, pd.DataFrame(best.trace), config.config_hash)

    checkpoint_path = run_dir / CHECKPOINT_NAME
    save_elcm_checkpoint(
        checkpoint_path,
        best.model,
        elcm_config,
        extra={
            "config_hash": config.config_hash,
            "method": config.method.value,
            "seed": seed,
            "graph_search": search.to_dict(),
        },
    )

    return RunRecord(
        config_hash=config.config_hash,
        method=config.method.value,
        seed=seed,
        val_loss=best.val_loss,
        checkpoint=str(checkpoint_path),
        trace=str(trace_path),
        wall_time=wall_time,
    )


def select_runs(records: list[RunRecord], method: Method) -> list[RunRecord]:
    """Flag the median run by the validation loss, or the best one for the
    explicit model. With an even count the lower median is flagged."""

    if not records:
        return records

    ranking = sorted(range(len(records)), key=lambda idx: (records[idx].val_loss, records[idx].seed))
    chosen = ranking[0] if Method(method) == Method.Elcm else ranking[(len(ranking) - 1) // 2]
    for idx, record in enumerate(records):
        record.selected = idx == chosen

    return records


def cmd_train(
    config: ExperimentConfig,
    workers: int = 1,
    resume: bool = False,
) -> list[RunRecord]:
    """Train one model per seed and flag the selected run.

    Each run writes a checkpoint and a trace.csv of the training
    diagnostics with the configuration hash on every row.

    Parameters
    ----------
    config : `ExperimentConfig`
        Experiment configuration.
    workers : `int`, optional
        Number of seeds trained at the same time. (the default is 1)
    resume : `bool`, optional
        Continue from the existing checkpoints of the implicit models. (the
        default is False)

    Returns
    -------
    `list` [`RunRecord`]
        Records in the order of the seeds.
    """

    train_pairs = load_split(config, Split.Train)
    val_pairs = load_split(config, Split.Val)

    if config.method == Method.Elcm:
        functions = [
            lambda seed=seed: _train_explicit(config, seed, train_pairs, val_pairs) for seed in config.seeds
        ]
    else:
        functions = [
            lambda seed=seed: _train_implicit(config, seed, train_pairs, val_pairs, resume) for seed in config.seeds
        ]

    records = select_runs(run_in_workers_sync(functions, workers=workers), config.method)
    _write_json(config.output / "runs" / RUNS_NAME, [record.to_dict() for record in records])

    for record in records:
        log.info(
            "Seed %d: validation loss %.4f%s.", record.seed, record.val_loss, " (selected)" if record.selected else ""
        )

    return records


def _read_runs(config: ExperimentConfig) -> list[RunRecord]:
    path = config.output / "runs" / RUNS_NAME
    if not path.exists():
        raise FileNotFoundError(f"Missing {path}; run the train command first.")

    return [RunRecord.from_dict(content) for content in json.loads(path.read_text())]


def _discover(
    z: np.ndarray,
    z_tilde: np.ndarray,
    targets: np.ndarray,
    alpha: float,
) -> typing.Any:
    try:
        return discover_interventional(z, z_tilde, targets, alpha=alpha)
    except InsufficientDataError as error:
        log.warning("Interventional discovery skipped: %s", error)
        return None


def _evaluate_run(
    config: ExperimentConfig,
    record: RunRecord,
    train_pairs: PairDataset,
    val_pairs: PairDataset,
    test_pairs: PairDataset,
    ignore_hash: bool,
    workers: int,
) -> MetricsRecord:
    header = read_container_header(record.checkpoint)
    if header.get("config_hash") != config.config_hash and not ignore_hash:
        raise ConfigError(
            f"{record.checkpoint} was trained with the configuration {header.get('config_hash')}, "
            f"expected {config.config_hash}."
        )

    if header.get("kind") == ELCM_CHECKPOINT_KIND:
        model, _, _ = load_elcm_checkpoint(record.checkpoint)
    else:
        model = load_checkpoint(record.checkpoint).model

    if model.data_dim != test_pairs.data_dim or model.n != config.dataset.n:
        raise DimensionError(
            f"Checkpoint with n={model.n}, data_dim={model.data_dim} does not match the test data "
            f"with n={config.dataset.n}, data_dim={test_pairs.data_dim}."
        )

    pairs = test_pairs[: config.evaluation.max_pairs]
    truth_scm, _ = build_ground_truth(config.dataset)
    options = config.evaluation

    posteriors = None
    learned = None
    heuristic = None
    graph_report = None
    if config.method == Method.Elcm:
        latents = model.encode_mean(pairs.x)
        posteriors = infer_elcm_interventions(model, pairs.x, pairs.x_tilde)
        learned = model.dag
    elif config.method == Method.BetaVae:
        latents = model.encode_mean(pairs.x)
    else:
        latents = latents_to_causal(model, pairs.x)
        posteriors = encode_intervention(model, pairs.x, pairs.x_tilde)
        learned = _discover(
            latents,
            latents_to_causal(model, pairs.x_tilde),
            posteriors.most_likely(),
            options.alpha,
        )

        inferred = infer_graph_heuristic(
            model,
            train_pairs.x[: options.graph_pairs],
            val_pairs.x[: options.graph_pairs],
            p_min=options.p_min,
        )
        heuristic = inferred.dag
        graph_report = inferred.to_dict()

    metrics = evaluate_representation(
        dataset=config.name,
        method=config.method.value,
        seed=record.seed,
        latents=latents,
        factors=pairs.z,
        truth=truth_scm.dag,
        posteriors=posteriors,
        true_targets=pairs.targets,
        learned=learned,
        heuristic=heuristic,
        workers=workers,
    )

    eval_dir = config.eval_dir(record.seed)
    _write_json(eval_dir / "metrics.json", dict(metrics.to_dict(), config_hash=config.config_hash))
    traversal = latent_traversal(model, num_points=options.traversal_points)
    _write_csv(eval_dir / "traversal.csv", traversal, config.config_hash)
    if graph_report is not None:
        _write_json(eval_dir / "graph.json", graph_report)

    return metrics


def cmd_eval(
    config: ExperimentConfig,
    workers: int = 1,
    ignore_hash: bool = False,
) -> list[MetricsRecord]:
    """Evaluate every trained run on the test split.

    Writes metrics.json, traversal.csv, and, for the implicit models,
    graph.json per run, and a metrics.csv summary. The metrics and the
    traversal rows carry the configuration hash.

    Parameters
    ----------
    config : `ExperimentConfig`
        Experiment configuration.
    workers : `int`, optional
        Number of regressors fitted at the same time. (the default is 1)
    ignore_hash : `bool`, optional
        Evaluate checkpoints trained with another configuration. (the
        default is False)

    Returns
    -------
    `list` [`MetricsRecord`]
        Metrics in the order of the runs.

    Raises
    ------
    `ConfigError`
        If a checkpoint was trained with another configuration.
    `DimensionError`
        If a checkpoint does not match the test data.
    """

    records = _read_runs(config)
    train_pairs = load_split(config, Split.Train)
    val_pairs = load_split(config, Split.Val)
    test_pairs = load_split(config, Split.Test)

    metrics = [
        _evaluate_run(config, record, train_pairs, val_pairs, test_pairs, ignore_hash, workers) for record in records
    ]

    frame = pd.DataFrame([record.to_dict() for record in metrics])
    frame["selected"] = [record.selected for record in records]
    frame.drop(columns=["learned_adjacency", "heuristic_adjacency"]).to_csv(
        config.output / "eval" / "metrics.csv", index=False
    )

    return metrics


@dataclass
class ReproduceReport:
    """Outcome of a reproduction.

    Attributes
    ----------
    table : `ReproduceTable`
        Reproduced experiment.
    checks : `list` [`tuple` [`str`, `bool`]]
        Named acceptance checks and their results.
    rows : `list` [`dict`]
        Metrics of the selected runs.
    complete : `bool`
        All steps ran within the budget.
    """

    table: ReproduceTable
    checks: list[tuple[str, bool]] = field(default_factory=list)
    rows: list[dict[str, typing.Any]] = field(default_factory=list)
    complete: bool = True

    @property
    def passed(self) -> bool:
        return self.complete and all(result for _, result in self.checks)

    def format(self) -> str:
        lines = [f"Reproduction of {self.table.value}:"]
        lines += [f"  {'PASS' if result else 'FAIL'}  {name}" for name, result in self.checks]
        if not self.complete:
            lines.append("  INCOMPLETE: the compute budget was exceeded.")
        lines.append(f"Overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


class _Budget:
    def __init__(self, minutes: float | None) -> None:
        self.deadline = None if minutes is None else time.monotonic() + 60.0 * minutes

    @property
    def exceeded(self) -> bool:
        return self.deadline is not None and time.monotonic() > self.deadline


def _run_pipeline(
    config: ExperimentConfig,
    workers: int,
    budget: _Budget,
) -> tuple[list[MetricsRecord], MetricsRecord] | None:
    """Generate (if missing), train, and evaluate. Returns the metrics of all
    runs and of the selected run, or None if the budget ran out."""

    if not all((config.data_dir / dataset_file_name(split)).exists() for split in Split):
        cmd_generate(config)

    if budget.exceeded:
        return None
    records = cmd_train(config, workers=workers)

    if budget.exceeded:
        return None
    metrics = cmd_eval(config, workers=workers)

    selected = [idx for idx, record in enumerate(records) if record.selected][0]
    return metrics, metrics[selected]


def _format_value(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.3f}"


def toy_comparison_checks(
    selected: typing.Mapping[Method, MetricsRecord],
    full_scale: bool = False,
) -> list[tuple[str, bool]]:
    """Acceptance checks of the 2D toy comparison.

    ILCM has to reach the disentanglement and accuracy thresholds and
    recover the graph on both the discovery and the heuristic path. The dVAE
    has to reach the accuracy while it stays entangled and misses the graph
    on the discovery path. The beta-VAE has to stay entangled.

    Parameters
    ----------
    selected : `dict` [`Method`, `MetricsRecord`]
        Metrics of the selected run of each method. The checks of a missing
        method are skipped.
    full_scale : `bool`, optional
        Use the thresholds of the full-scale training steps. (the default is
        False)

    Returns
    -------
    `list` [`tuple` [`str`, `bool`]]
        Named checks and their results.
    """

    threshold_d, threshold_acc = TOY_THRESHOLDS_FULL if full_scale else TOY_THRESHOLDS_CI

    checks = list()
    ilcm = selected.get(Method.Ilcm)
    if ilcm is not None:
        checks += [
            (f"ILCM D {ilcm.D:.3f} >= {threshold_d}", ilcm.D >= threshold_d),
            (
                f"ILCM accuracy {_format_value(ilcm.accuracy)} >= {threshold_acc}",
                ilcm.accuracy is not None and ilcm.accuracy >= threshold_acc,
            ),
            (f"ILCM SHD (discovery) {ilcm.shd} == 0", ilcm.shd == 0),
            (f"ILCM SHD (heuristic) {ilcm.shd_heuristic} == 0", ilcm.shd_heuristic == 0),
        ]

    dvae = selected.get(Method.Dvae)
    if dvae is not None:
        checks += [
            (
                f"dVAE accuracy {_format_value(dvae.accuracy)} >= {BASELINE_ACCURACY}",
                dvae.accuracy is not None and dvae.accuracy >= BASELINE_ACCURACY,
            ),
            (
                f"dVAE D {dvae.D:.3f} <= {BASELINE_DISENTANGLEMENT_MAXIMUM}",
                dvae.D <= BASELINE_DISENTANGLEMENT_MAXIMUM,
            ),
            (f"dVAE SHD (discovery) {dvae.shd} >= 1", dvae.shd is not None and dvae.shd >= 1),
        ]

    beta_vae = selected.get(Method.BetaVae)
    if beta_vae is not None:
        checks.append(
            (
                f"beta-VAE D {beta_vae.D:.3f} <= {BASELINE_DISENTANGLEMENT_MAXIMUM}",
                beta_vae.D <= BASELINE_DISENTANGLEMENT_MAXIMUM,
            )
        )

    return checks


def summarize_scaling(
    n: int,
    runs: typing.Sequence[MetricsRecord],
) -> tuple[dict[str, typing.Any], list[tuple[str, bool]]]:
    """Aggregate the runs of one size of the scaling sweep.

    The mean disentanglement is checked up to 6 variables and the mean SHD
    of the discovered graphs up to 4 variables.

    Parameters
    ----------
    n : `int`
        Number of causal variables.
    runs : `list` [`MetricsRecord`]
        Metrics of all runs over all datasets of the size.

    Returns
    -------
    row : `dict`
        Means over the runs.
    checks : `list` [`tuple` [`str`, `bool`]]
        Named checks and their results.

    Raises
    ------
    `ContractError`
        If there are no runs.
    """

    if len(runs) == 0:
        raise ContractError(f"No runs to summarize for n={n}.")

    mean_d = float(np.mean([metrics.D for metrics in runs]))
    shds = [metrics.shd for metrics in runs if metrics.shd is not None]
    mean_shd = float(np.mean(shds)) if shds else None
    row = {
        "n": n,
        "mean_D": mean_d,
        "mean_accuracy": float(np.mean([metrics.accuracy or 0.0 for metrics in runs])),
        "mean_shd": mean_shd,
        "runs": len(runs),
    }

    checks = list()
    if n <= SCALING_CHECKED_MAXIMUM:
        checks.append((f"n={n}: mean D {mean_d:.3f} >= {SCALING_DISENTANGLEMENT}", mean_d >= SCALING_DISENTANGLEMENT))

    if n <= SCALING_SHD_CHECKED_MAXIMUM:
        # Every run needs a discovered graph
        checks.append(
            (
                f"n={n}: mean SHD {_format_value(mean_shd)} <= {SCALING_SHD_MAXIMUM}",
                mean_shd is not None and len(shds) == len(runs) and mean_shd <= SCALING_SHD_MAXIMUM,
            )
        )

    return row, checks


def cmd_reproduce(
    table: ReproduceTable | str,
    output: str | Path,
    seeds: typing.Sequence[int] | None = None,
    workers: int = 1,
    full_scale: bool = False,
    budget_minutes: float | None = None,
) -> ReproduceReport:
    """Run an experiment end to end and check it against the acceptance
    thresholds.

    Parameters
    ----------
    table : `ReproduceTable` or `str`
        Experiment.
    output : `str` or `pathlib.Path`
        Output directory.
    seeds : `list` [`int`] or None, optional
        Seeds. If None, the seeds of the shipped configuration. (the default
        is None)
    workers : `int`, optional
        Number of seeds trained at the same time. (the default is 1)
    full_scale : `bool`, optional
        Use the full-scale training steps. (the default is False)
    budget_minutes : `float` or None, optional
        Compute budget. The remaining steps are skipped once it is exceeded
        and the report is marked incomplete. (the default is None)

    Returns
    -------
    `ReproduceReport`
        Report.

    Raises
    ------
    `ConfigError`
        If the experiment is unknown.
    """

    try:
        table = ReproduceTable(table)
    except ValueError:
        raise ConfigError(f"Unknown experiment {table!r}; choose from {[item.value for item in ReproduceTable]}.")

    output = Path(output)
    budget = _Budget(budget_minutes)
    report = ReproduceReport(table=table)

    if table == ReproduceTable.ToyComparison:
        base = load_experiment_config(get_default_config_path("toy2d.yaml"), full_scale=full_scale)

        selected: dict[Method, MetricsRecord] = dict()
        for method in (Method.Ilcm, Method.Dvae, Method.BetaVae):
            config = base.replace(method=method, output=output / "toy" / method.value)
            if seeds is not None:
                config = config.replace(seeds=tuple(seeds))

            outcome = _run_pipeline(config, workers, budget)
            if outcome is None:
                report.complete = False
                break

            _, selected[method] = outcome
            report.rows.append(selected[method].to_dict())

        report.checks += toy_comparison_checks(selected, full_scale=full_scale)
    else:
        base = load_experiment_config(get_default_config_path("scaling.yaml"), full_scale=full_scale)
        for n in SCALING_SIZES:
            runs: list[MetricsRecord] = list()
            for dataset_seed in range(base.dataset.seed, base.dataset.seed + SCALING_DATASETS):
                dataset = dataclasses.replace(base.dataset, family=DatasetFamily.LinearScaling, n=n, seed=dataset_seed)
                config = base.replace(dataset=dataset, output=output / "scaling" / f"n{n}" / f"data{dataset_seed}")
                if seeds is not None:
                    config = config.replace(seeds=tuple(seeds))

                outcome = _run_pipeline(config, workers, budget)
                if outcome is None:
                    report.complete = False
                    break

                runs += outcome[0]

            if not report.complete:
                break

            row, checks = summarize_scaling(n, runs)
            report.rows.append(row)
            report.checks += checks

        if report.rows:
            output.mkdir(parents=True, exist_ok=True)
            pd.DataFrame(report.rows).to_csv(output / "scaling.csv", index=False)

    _write_json(
        output / f"{table.value}.json",
        {"checks": report.checks, "rows": report.rows, "complete": report.complete, "passed": report.passed},
    )
    return report


def cmd_inspect_checkpoint(path: str | Path) -> dict[str, typing.Any]:
    """Header of a checkpoint or dataset file."""
    return read_container_header(path)
