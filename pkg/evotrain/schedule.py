"""

Copyright (c) 2026 evotrain developers

SPDX-License-Identifier: MIT

Layer-wise schedules for training network weights with SHADE-ILS.

An epoch is L * n_eval evaluations of the training loss, L being the number
of layers that hold trainable parameters.

"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .version import __version__
from .constants import ADAPTIVE_SCHEDULES, LocalSearchKind, Mode, ScheduleKind, schedule_first_pass_reversed
from .errors import BudgetError, ConfigError
from .ils import ShadeIls
from .network import LayerLayout, accuracy, aggregate_loss, evaluate, glorot_init
from .record import RunRecord

SMOOTHING = 0.01
ACC_FLOOR = 1e-6
PLAN_STREAM = 0x5C4ED


def parameterized_layers(network):
    return LayerLayout.from_network(network).layer_ids


class PlanStep(NamedTuple):
    layer: Optional[int]
    evals: int

    @property
    def is_full(self):
        return self.layer is None


@dataclass
class ScheduleState:
    layer_ids: list
    n_eval: int
    ratios: np.ndarray = None
    probs: np.ndarray = None
    smoothing: float = SMOOTHING
    epoch: int = 0
    evals_this_epoch: int = 0

    def __post_init__(self):
        self.layer_ids = list(self.layer_ids)
        count = len(self.layer_ids)
        if self.ratios is None:
            self.ratios = np.zeros(count)
        if self.probs is None:
            self.probs = np.full(count, 1.0 / count) if count else np.zeros(0)

    @property
    def num_layers(self):
        return len(self.layer_ids)

    @property
    def epoch_budget(self):
        return self.num_layers * self.n_eval


def epoch_plan(kind, state, rng=None):
    """Steps of the coming epoch; only adaptive schedules after their first
    epoch draw from ``rng``."""
    kind = ScheduleKind(kind)
    if state.num_layers == 0:
        raise ConfigError("network has no trainable layers to schedule")

    if kind is ScheduleKind.FULL:
        return [PlanStep(None, state.epoch_budget)]

    if kind in ADAPTIVE_SCHEDULES and state.epoch > 0:
        picks = rng.choice(state.num_layers, size=state.num_layers, replace=True, p=state.probs)
        return [PlanStep(state.layer_ids[int(k)], state.n_eval) for k in picks]

    order = list(state.layer_ids)
    if schedule_first_pass_reversed[kind]:
        order.reverse()
    return [PlanStep(layer, state.n_eval) for layer in order]


def update_ratios(state, layer, acc_before, acc_after, smoothing=None):
    if smoothing is None:
        smoothing = state.smoothing
    k = state.layer_ids.index(layer)
    state.ratios[k] = max(0.0, (acc_after - acc_before) / max(acc_before, ACC_FLOOR))
    weights = state.ratios + smoothing
    total = weights.sum()
    if total > 0:
        state.probs = weights / total
    else:
        state.probs = np.full(state.num_layers, 1.0 / state.num_layers)
    return state


@dataclass(frozen=True)
class SolverConfig:
    np_size: int = 10
    n_eval: int = 200
    epochs: int = 20
    frac_global: float = 0.5
    chunk_evals: Optional[int] = None
    restart_threshold: float = 0.05
    restart_patience: int = 3
    restart_width: float = 0.1
    mts_step: float = 0.2
    bounds: tuple = (-5.0, 5.0)
    perturbation: float = 1.0
    smoothing: float = SMOOTHING
    local_searches: tuple = field(default=tuple(k.value for k in LocalSearchKind))
    seed: int = 0

    def __post_init__(self):
        if self.np_size < 4:
            raise ConfigError(f"np_size must be at least 4, got {self.np_size}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be at least 1, got {self.epochs}")
        if not 0.0 <= self.frac_global <= 1.0:
            raise ConfigError(f"frac_global must be in [0, 1], got {self.frac_global}")
        if len(self.bounds) != 2 or not self.bounds[0] < self.bounds[1]:
            raise ConfigError(f"bounds must be [lower, upper], got {self.bounds}")
        if self.perturbation <= 0 or self.smoothing <= 0:
            raise ConfigError("perturbation and smoothing must be positive")
        try:
            object.__setattr__(self, 'local_searches',
                tuple(LocalSearchKind(k).value for k in self.local_searches))
        except ValueError:
            raise ConfigError(f"unknown local search in {self.local_searches!r}") from None


def step_seed(seed, epoch, position):
    return int(np.random.SeedSequence((seed, epoch, position)).generate_state(1)[0])


class ScheduledTrainer:

    def __init__(self, network, kind, config=None, run_id=0, threads=None):
        self.log = logging.getLogger(f"evotrain.{type(self).__name__}")
        self.network = network
        self.kind = ScheduleKind(kind)
        self.config = config or SolverConfig()
        self.run_id = run_id
        self.threads = threads

        self.log.info("Scheduled SHADE-ILS trainer (%s)", self.kind.value)
        self.log.info("evotrain version %s", __version__)

        network.check()
        self.layout = LayerLayout.from_network(network)
        self.limits = self.layout.glorot_limits()
        self.state = ScheduleState(self.layout.layer_ids, self.config.n_eval, smoothing=self.config.smoothing)
        if self.state.num_layers == 0:
            raise ConfigError("network has no trainable layers to schedule")
        if self.config.n_eval < self.config.np_size:
            raise BudgetError(f"n_eval ({self.config.n_eval}) must cover the population size ({self.config.np_size})")

        self.evals = 0
        self.aux_evals = 0

    def _step_slice(self, step):
        if step.is_full:
            return slice(0, self.layout.total)
        return self.layout.segment(step.layer).slice

    def _run_step(self, params, train, step, seed):
        network = self.network
        cfg = self.config
        seg = self._step_slice(step)
        before = params.values[seg]

        def objective(x):
            return aggregate_loss(network, params.with_segment(seg, x), train, Mode.EVAL)

        solver = ShadeIls(objective, len(before), cfg.bounds, np_size=cfg.np_size,
            frac_global=cfg.frac_global, chunk_evals=cfg.chunk_evals,
            restart_threshold=cfg.restart_threshold, restart_patience=cfg.restart_patience,
            restart_width=cfg.restart_width, mts_step=cfg.mts_step, seed=seed, threads=self.threads,
            init=before, init_width=cfg.perturbation * self.limits[seg],
            local_searches=cfg.local_searches)
        best, _ = solver.run(step.evals)
        self.evals += solver.eval_count
        self.state.evals_this_epoch += solver.eval_count
        return params.with_segment(seg, best.position), best.fitness

    def train(self, train, test=None, init=None):
        cfg = self.config
        params = glorot_init(self.network, cfg.seed) if init is None else init
        plan_rng = np.random.default_rng((cfg.seed, PLAN_STREAM))
        records = []
        start = time.perf_counter()

        self.log.info("Training %r: %d layers, %d evaluations per epoch, %d epochs",
            self.network, self.state.num_layers, self.state.epoch_budget, cfg.epochs)

        for epoch in range(1, cfg.epochs + 1):
            self.state.evals_this_epoch = 0
            plan = epoch_plan(self.kind, self.state, plan_rng)
            self.log.debug("Epoch %d plan: %s", epoch, [s.layer if not s.is_full else 'all' for s in plan])

            for position, step in enumerate(plan):
                seed = step_seed(cfg.seed, epoch, position)
                if step.is_full:
                    params, loss = self._run_step(params, train, step, seed)
                    self.log.debug("Full step: loss %.6g", loss)
                    continue
                acc_before = accuracy(self.network, params, train)
                params, loss = self._run_step(params, train, step, seed)
                acc_after = accuracy(self.network, params, train)
                self.aux_evals += 2
                update_ratios(self.state, step.layer, acc_before, acc_after)
                self.log.debug("Layer %d: loss %.6g, accuracy %.4f -> %.4f",
                    step.layer, loss, acc_before, acc_after)

            expected = self.state.epoch_budget
            if self.state.evals_this_epoch != expected:
                raise BudgetError(f"epoch {epoch} used {self.state.evals_this_epoch} evaluations, expected {expected}")
            assert self.evals == epoch * expected

            self.state.epoch = epoch
            train_loss, train_acc = evaluate(self.network, params, train)
            if test is not None:
                test_loss, test_acc = evaluate(self.network, params, test)
            else:
                test_loss, test_acc = math.nan, math.nan
            records.append(RunRecord(
                run_id=self.run_id,
                seed=cfg.seed,
                solver="shade-ils",
                schedule=self.kind.value,
                epoch=epoch,
                train_loss=train_loss,
                train_acc=train_acc,
                test_loss=test_loss,
                test_acc=test_acc,
                evals_cumulative=self.evals,
                wall_ms=int((time.perf_counter() - start) * 1000),
            ))
            self.log.info("Epoch %d: train loss %.4f acc %.4f, test loss %.4f acc %.4f",
                epoch, train_loss, train_acc, test_loss, test_acc)

        self.log.info("%d loss evaluations, %d accuracy evaluations", self.evals, self.aux_evals)
        return params, records


def scheduled_training_run(network, dataset_train, dataset_test, kind, n_eval=200, epochs=20, np_size=10,
        seed=0, run_id=0, threads=None, init=None, **options):
    config = SolverConfig(np_size=np_size, n_eval=n_eval, epochs=epochs, seed=seed, **options)
    trainer = ScheduledTrainer(network, kind, config, run_id=run_id, threads=threads)
    return trainer.train(dataset_train, dataset_test, init)
