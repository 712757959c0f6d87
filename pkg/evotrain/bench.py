"""

Copyright (c) 2026 evotrain developers

SPDX-License-Identifier: MIT

Experiment orchestration: data loading, multi-seed runs, record and summary
tables.

"""

import dataclasses
import logging
import math
import time
from pathlib import Path

import numpy as np
import pandas as pd

from .version import __version__
from .architectures import get_architecture
from .constants import ExperimentKind
from .data import RawImageSet, load_idx, load_raw, normalize, subsample, synthetic_blobs, to_grayscale
from .errors import AlignmentError, ConfigError, EmptyGroupError
from .gradient import GradientTrainer
from .netspec import load_network
from .parallel import ordered_map, worker_count
from .record import METRICS, RunRecord, atomic_write, config_preamble, records_to_frame, write_frame_csv
from .schedule import ScheduledTrainer
from .topo import EvolutionRunner, dump_genome

RECORDS_FILE = "records.csv"
SUMMARY_FILE = "summary.csv"
TRACE_FILE = "trace.csv"
BEST_GENOME_FILE = "best_genome.yaml"
BEST_GENOMES_FILE = "best_genomes.csv"


def _reduce(dataset, size, seed, stratified):
    if size is None or size == len(dataset):
        return dataset
    return subsample(dataset, size, seed, stratified)


def _prepare(raw, data, size, num_classes):
    raw = _reduce(raw, size, data.subsample_seed, data.stratified)
    if isinstance(raw, RawImageSet):
        if data.grayscale and raw.image_shape[2] == 3:
            raw = to_grayscale(raw)
        return normalize(raw, num_classes)
    if data.grayscale:
        raise ConfigError("grayscale conversion needs byte images")
    return raw


def _num_classes(*label_sets):
    return max(int(np.max(labels)) for labels in label_sets if labels is not None) + 1


def load_datasets(data):
    """(train, test) datasets for a DataSection; test may be None."""
    if data.source == 'synthetic':
        train = synthetic_blobs(data.classes, data.per_class, data.image_hw, data.synthetic_seed,
            data.channels, data.noise)
        test = synthetic_blobs(data.classes, data.test_per_class, data.image_hw, data.synthetic_seed + 1,
            data.channels, data.noise)
        return train, test

    loader = load_idx if data.source == 'idx' else load_raw
    train_raw = loader(data.train_images, data.train_labels)
    test_raw = None
    if data.test_images is not None:
        test_raw = loader(data.test_images, data.test_labels)

    num_classes = data.num_classes
    if num_classes is None:
        num_classes = _num_classes(train_raw.labels, None if test_raw is None else test_raw.labels)

    train = _prepare(train_raw, data, data.train_size, num_classes)
    test = None if test_raw is None else _prepare(test_raw, data, data.test_size, num_classes)
    return train, test


def load_experiment_network(section):
    if section.spec is not None:
        return load_network(Path(section.spec))
    try:
        return get_architecture(section.architecture)
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from None


@dataclasses.dataclass
class RunResult:
    records: list
    best: object = None
    trace: list = None


class ExperimentRunner:

    def __init__(self, config, threads=None):
        self.log = logging.getLogger(f"evotrain.{type(self).__name__}")
        self.config = config
        self.threads = worker_count(threads if threads is not None else config.experiment.threads)

        self.log.info("Experiment runner")
        self.log.info("evotrain version %s", __version__)
        self.log.info("%s: %d runs from seed %d", config.kind.value, config.experiment.runs,
            config.experiment.base_seed)

        self.network = None
        self.train = None
        self.test = None

    def setup(self):
        config = self.config.validate()
        self.train, self.test = load_datasets(config.data)
        if config.kind in (ExperimentKind.GRADIENT_TRAIN, ExperimentKind.SHADE_ILS_TRAIN):
            self.network = load_experiment_network(config.network)
            self.network.check()
            if tuple(self.network.input_shape) != self.train.input_shape:
                raise ConfigError(f"network input {list(self.network.input_shape)} does not match "
                    f"data {list(self.train.input_shape)}")
            if self.network.num_classes != self.train.num_classes:
                raise ConfigError(f"network predicts {self.network.num_classes} classes, "
                    f"data has {self.train.num_classes}")
        self.log.info("Train %r, test %r", self.train, self.test)

    def _jobs(self):
        config = self.config
        seeds = config.seeds
        if config.kind is ExperimentKind.SHADE_ILS_TRAIN:
            return [(run_id, seed, kind) for kind in config.schedule.kinds for run_id, seed in enumerate(seeds)]
        return [(run_id, seed, None) for run_id, seed in enumerate(seeds)]

    def run_one(self, job, inner_threads=None):
        run_id, seed, schedule = job
        config = self.config
        kind = config.kind

        if kind is ExperimentKind.GRADIENT_TRAIN:
            trainer = GradientTrainer(self.network, dataclasses.replace(config.training, seed=seed), run_id=run_id)
            _, records = trainer.train(self.train, self.test)
            return RunResult(records)

        if kind is ExperimentKind.SHADE_ILS_TRAIN:
            trainer = ScheduledTrainer(self.network, schedule, dataclasses.replace(config.solver, seed=seed),
                run_id=run_id, threads=inner_threads)
            _, records = trainer.train(self.train, self.test)
            return RunResult(records)

        start = time.perf_counter()
        runner = EvolutionRunner(self.train, dataclasses.replace(config.search, seed=seed), self.test,
            threads=inner_threads)
        if kind is ExperimentKind.TOPO_EVOLVE:
            best, trace = runner.run()
            generations = len(trace) - 1
        else:
            best, trace = runner.random_search(), None
            generations = 0
        record = RunRecord(
            run_id=run_id,
            seed=seed,
            solver=kind.value,
            schedule="",
            epoch=max(generations, 1),
            train_loss=_metric(best.train_loss),
            train_acc=_metric(best.train_acc),
            test_loss=_metric(best.test_loss),
            test_acc=_metric(best.test_acc),
            evals_cumulative=runner.evaluations,
            wall_ms=int((time.perf_counter() - start) * 1000),
        )
        return RunResult([record], best, trace)

    def run(self):
        if self.train is None:
            self.setup()
        jobs = self._jobs()
        outer = min(self.threads, len(jobs))
        inner = max(1, self.threads // outer)
        return ordered_map(lambda job: self.run_one(job, inner), jobs, outer)


def _metric(value):
    return math.nan if value is None else float(value)


def trace_frame(results):
    rows = []
    for result in results:
        record = result.records[0]
        for stats in result.trace or ():
            rows.append({'run_id': record.run_id, 'seed': record.seed,
                'generation': stats.generation, 'best_fitness': stats.best_fitness,
                'mean_fitness': stats.mean_fitness, 'evaluations': stats.evaluations})
    return pd.DataFrame(rows, columns=['run_id', 'seed', 'generation', 'best_fitness', 'mean_fitness',
        'evaluations'])


def best_genomes_frame(results):
    rows = []
    for result in results:
        best = result.best
        record = result.records[0]
        rows.append({'run_id': record.run_id, 'seed': record.seed, 'solver': record.solver,
            'fitness': best.fitness, 'model_params': best.model_params, 'wall_ms': best.wall_ms,
            'train_acc': _metric(best.train_acc), 'test_acc': _metric(best.test_acc),
            'depth': len(best.genome), 'genome': repr(best.genome)})
    return pd.DataFrame(rows)


def run_experiment(config, threads=None, output_dir=None):
    """Run every repetition of ``config`` and write its outputs.

    Nothing is written unless every run finishes.
    """
    runner = ExperimentRunner(config, threads)
    results = runner.run()
    records = [r for result in results for r in result.records]

    out = Path(output_dir if output_dir is not None else config.experiment.output_dir)
    resolved = config.resolved()
    write_frame_csv(records_to_frame(records), out / RECORDS_FILE, resolved)
    write_frame_csv(aggregate(records), out / SUMMARY_FILE, resolved, kind="summary")

    if config.kind in (ExperimentKind.TOPO_EVOLVE, ExperimentKind.RANDOM_TOPO):
        write_frame_csv(best_genomes_frame(results), out / BEST_GENOMES_FILE, resolved, kind="best-genomes")
        if config.kind is ExperimentKind.TOPO_EVOLVE:
            write_frame_csv(trace_frame(results), out / TRACE_FILE, resolved, kind="trace")
        winner = max(results, key=lambda r: (r.best.fitness, -r.records[0].run_id)).best
        with atomic_write(out / BEST_GENOME_FILE) as f:
            f.write(config_preamble(resolved, kind="best-genome"))
            f.write(dump_genome(winner.genome, runner.train.input_shape))

    runner.log.info("Wrote %d records to %s", len(records), out)
    return records


def final_epochs(records):
    """Each run's last-epoch record, per (solver, schedule, run_id)."""
    frame = records_to_frame(records) if not isinstance(records, pd.DataFrame) else records
    if frame.empty:
        raise EmptyGroupError("no records to aggregate")
    frame = frame.sort_values(['solver', 'schedule', 'run_id', 'epoch'], kind='stable')
    return frame.groupby(['solver', 'schedule', 'run_id'], sort=True).tail(1)


def aggregate(records):
    """Mean and sample standard deviation of final metrics per solver and schedule."""
    finals = final_epochs(records)
    rows = []
    for (solver, schedule), group in finals.groupby(['solver', 'schedule'], sort=True):
        n = len(group)
        row = {'solver': solver, 'schedule': schedule, 'n': n, 'single_run': n == 1}
        for metric in METRICS:
            values = group[metric].astype(float)
            row[f"{metric}_mean"] = float(values.mean())
            row[f"{metric}_std"] = float(values.std(ddof=1)) if n > 1 else 0.0
        rows.append(row)
    if not rows:
        raise EmptyGroupError("no groups to aggregate")
    return pd.DataFrame(rows)


def group_label(solver, schedule):
    return f"{solver}/{schedule}" if schedule else solver


def emit_plotdata(records, out_path=None, config=None):
    """Per-epoch mean and std of every metric per group, in long form."""
    frame = records_to_frame(records) if not isinstance(records, pd.DataFrame) else records
    if frame.empty:
        raise EmptyGroupError("no records to plot")
    frame = frame.assign(group=[group_label(s, k) for s, k in zip(frame['solver'], frame['schedule'])])

    for group, rows in frame.groupby('group', sort=True):
        epochs = {run: tuple(sorted(r['epoch'])) for run, r in rows.groupby('run_id')}
        if len(set(epochs.values())) > 1:
            raise AlignmentError(f"runs of {group} cover different epochs: "
                f"{sorted(len(e) for e in epochs.values())} epochs per run")

    long = frame.melt(id_vars=['group', 'run_id', 'epoch'], value_vars=list(METRICS),
        var_name='metric', value_name='value')
    stats = long.groupby(['epoch', 'group', 'metric'], sort=True)['value']
    table = stats.agg(['mean', 'std']).reset_index()
    # a single run has no spread
    table['std'] = table['std'].fillna(0.0)

    if out_path is not None:
        write_frame_csv(table, out_path, config, kind="plotdata")
    return table
