#!/usr/bin/env python
"""

Copyright (c) 2026 evotrain developers

SPDX-License-Identifier: MIT

"""

import numpy as np
import pytest

from evotrain.architectures import get_architecture
from evotrain.constants import ScheduleKind
from evotrain.data import synthetic_blobs
from evotrain.errors import BudgetError, ConfigError
from evotrain.network import LayerSpec as L, NetworkSpec, aggregate_loss, glorot_init
from evotrain.schedule import (ACC_FLOOR, PlanStep, ScheduledTrainer, ScheduleState, SolverConfig, epoch_plan,
    parameterized_layers, scheduled_training_run, step_seed, update_ratios)


def two_layer_network():
    return NetworkSpec((8, 8, 1), (L.conv2d(2, 3), L.maxpool(), L.flatten(), L.dense(2)))


def one_layer_network():
    return NetworkSpec((8, 8, 1), (L.flatten(), L.dense(2)))


class TB:
    def __init__(self, network=None, n_eval=24, epochs=2, np_size=4, seed=0):
        self.network = network or two_layer_network()
        self.train = synthetic_blobs(2, 12, (8, 8), seed=1)
        self.test = synthetic_blobs(2, 6, (8, 8), seed=2)
        self.config = SolverConfig(np_size=np_size, n_eval=n_eval, epochs=epochs, seed=seed)

    def trainer(self, kind, run_id=0):
        return ScheduledTrainer(self.network, kind, self.config, run_id=run_id, threads=1)

    def run(self, kind):
        trainer = self.trainer(kind)
        params, records = trainer.train(self.train, self.test)
        return trainer, params, records


def test_parameterized_layers():
    assert parameterized_layers(get_architecture('mnist')) == [0, 2, 4, 7, 9, 11]
    assert len(parameterized_layers(get_architecture('mnist'))) == 6
    assert parameterized_layers(two_layer_network()) == [0, 3]


def test_epoch_plan_fixed_orders():
    state = ScheduleState([0, 1, 2], n_eval=200)

    down = epoch_plan(ScheduleKind.DOWN, state)
    up = epoch_plan(ScheduleKind.UP, state)

    assert [s.layer for s in down] == [0, 1, 2]
    assert [s.layer for s in up] == [2, 1, 0]
    assert all(s.evals == 200 for s in down + up)

    # fixed schedules repeat the same order every epoch
    state.epoch = 5
    assert [s.layer for s in epoch_plan('up', state)] == [2, 1, 0]


def test_epoch_plan_full():
    state = ScheduleState(range(8), n_eval=200)
    plan = epoch_plan(ScheduleKind.FULL, state)

    assert plan == [PlanStep(None, 1600)]
    assert plan[0].is_full


@pytest.mark.parametrize("kind, order", [
    (ScheduleKind.A_UP, [2, 1, 0]),
    (ScheduleKind.A_DOWN, [0, 1, 2]),
])
def test_adaptive_first_epoch_is_fixed(kind, order):
    state = ScheduleState([0, 1, 2], n_eval=10)
    # no generator needed for the first epoch
    assert [s.layer for s in epoch_plan(kind, state)] == order


def test_adaptive_epoch_follows_probabilities():
    state = ScheduleState([0, 4, 9], n_eval=10)
    state.epoch = 1
    state.probs = np.array([0.0, 1.0, 0.0])

    plan = epoch_plan(ScheduleKind.A_UP, state, np.random.default_rng(3))

    assert [s.layer for s in plan] == [4, 4, 4]
    assert sum(s.evals for s in plan) == state.epoch_budget


def test_adaptive_epoch_deterministic():
    state = ScheduleState([0, 1, 2, 3], n_eval=10)
    state.epoch = 2
    state.probs = np.array([0.1, 0.2, 0.3, 0.4])

    a = epoch_plan(ScheduleKind.A_DOWN, state, np.random.default_rng(11))
    b = epoch_plan(ScheduleKind.A_DOWN, state, np.random.default_rng(11))
    assert a == b
    assert len(a) == 4


@pytest.mark.parametrize("kind", list(ScheduleKind))
def test_epoch_plan_no_layers(kind):
    with pytest.raises(ConfigError):
        epoch_plan(kind, ScheduleState([], n_eval=10))


def test_update_ratios_uniform_when_flat():
    state = ScheduleState([0, 1], n_eval=10)
    update_ratios(state, 0, 0.5, 0.5, smoothing=0.0)
    update_ratios(state, 1, 0.5, 0.4, smoothing=0.0)

    assert state.ratios.tolist() == [0.0, 0.0]
    assert state.probs.tolist() == [0.5, 0.5]


def test_update_ratios_proportional():
    state = ScheduleState([0, 3], n_eval=10)
    update_ratios(state, 0, 0.5, 0.65, smoothing=0.0)
    update_ratios(state, 3, 0.5, 0.55, smoothing=0.0)

    assert state.ratios == pytest.approx([0.3, 0.1])
    assert state.probs == pytest.approx([0.75, 0.25])
    assert state.probs.sum() == pytest.approx(1.0)


def test_update_ratios_smoothing():
    state = ScheduleState([0, 1], n_eval=10)
    update_ratios(state, 0, 0.5, 0.6)

    # the unimproved layer keeps a small chance
    assert state.probs[1] == pytest.approx(0.01 / 0.22)
    assert state.probs[0] > state.probs[1] > 0


def test_update_ratios_clamps_and_floors():
    state = ScheduleState([0, 1], n_eval=10)
    update_ratios(state, 0, 0.8, 0.2)
    assert state.ratios[0] == 0.0

    update_ratios(state, 1, 0.0, 0.5)
    assert state.ratios[1] == pytest.approx(0.5 / ACC_FLOOR)


def test_step_seed():
    assert step_seed(0, 1, 0) == step_seed(0, 1, 0)
    assert len({step_seed(0, e, p) for e in range(3) for p in range(3)}) == 9


@pytest.mark.parametrize("kwargs", [
    dict(np_size=3),
    dict(epochs=0),
    dict(frac_global=1.5),
    dict(bounds=(1.0, -1.0)),
    dict(perturbation=0.0),
    dict(smoothing=-0.1),
    dict(smoothing=0.0),
    dict(local_searches=('lbfgs', 'newton')),
])
def test_solver_config_validation(kwargs):
    with pytest.raises(ConfigError):
        SolverConfig(**kwargs)


def test_trainer_rejects_small_budget():
    tb = TB(n_eval=3, np_size=4)
    with pytest.raises(BudgetError):
        tb.trainer(ScheduleKind.FULL)


@pytest.mark.parametrize("kind", [ScheduleKind.DOWN, ScheduleKind.A_UP])
def test_budget_equal_to_population(kind):
    tb = TB(n_eval=4, np_size=4, epochs=2)
    trainer, _, records = tb.run(kind)

    assert trainer.evals == 2 * 2 * 4
    assert [r.evals_cumulative for r in records] == [8, 16]


@pytest.mark.parametrize("kind", list(ScheduleKind))
def test_epoch_evaluation_counts(kind):
    tb = TB(n_eval=24, epochs=2)
    trainer, params, records = tb.run(kind)

    epoch_budget = 2 * 24
    assert trainer.evals == 2 * epoch_budget
    assert [r.evals_cumulative for r in records] == [epoch_budget, 2 * epoch_budget]
    assert [r.epoch for r in records] == [1, 2]
    assert all(r.schedule == kind.value and r.solver == "shade-ils" for r in records)
    assert len(params) == 20 + 38


@pytest.mark.parametrize("kind", list(ScheduleKind))
def test_training_loss_never_increases(kind):
    tb = TB(epochs=3)
    start = aggregate_loss(tb.network, glorot_init(tb.network, 0), tb.train)
    _, _, records = tb.run(kind)

    losses = [start] + [r.train_loss for r in records]
    for before, after in zip(losses, losses[1:]):
        assert after <= before + 1e-12


def test_layer_step_freezes_other_layers():
    tb = TB()
    trainer = tb.trainer(ScheduleKind.DOWN)
    params = glorot_init(tb.network, 5)

    updated, loss = trainer._run_step(params, tb.train, PlanStep(3, 24), seed=7)

    frozen = trainer.layout.segment(0).slice
    assert np.array_equal(updated.values[frozen], params.values[frozen])
    assert trainer.evals == 24
    assert loss <= aggregate_loss(tb.network, params, tb.train)


def test_full_matches_down_for_single_layer():
    tb = TB(network=one_layer_network(), epochs=2)
    _, full_params, full_records = tb.run(ScheduleKind.FULL)
    _, down_params, down_records = tb.run(ScheduleKind.DOWN)

    assert full_params == down_params
    for a, b in zip(full_records, down_records):
        assert (a.train_loss, a.train_acc, a.test_loss, a.test_acc) == (b.train_loss, b.train_acc,
            b.test_loss, b.test_acc)


def test_adaptive_state_after_training():
    tb = TB(epochs=2)
    trainer, _, _ = tb.run(ScheduleKind.A_UP)

    assert trainer.state.epoch == 2
    assert trainer.state.probs.sum() == pytest.approx(1.0)
    assert np.all(trainer.state.probs > 0)
    assert trainer.aux_evals > 0


def test_full_skips_accuracy_bookkeeping():
    tb = TB(epochs=1)
    trainer, _, _ = tb.run(ScheduleKind.FULL)
    assert trainer.aux_evals == 0


def test_training_deterministic():
    tb = TB(epochs=2)
    _, p1, r1 = tb.run(ScheduleKind.A_DOWN)
    _, p2, r2 = tb.run(ScheduleKind.A_DOWN)

    assert p1 == p2
    assert [r.train_loss for r in r1] == [r.train_loss for r in r2]


def test_scheduled_training_run_without_test():
    data = synthetic_blobs(2, 10, (8, 8), seed=4)
    _, records = scheduled_training_run(one_layer_network(), data, None, 'up', n_eval=12, epochs=1,
        np_size=4, seed=3, threads=1)

    assert len(records) == 1
    assert np.isnan(records[0].test_loss)
    assert records[0].seed == 3


def test_trainer_uses_given_init():
    tb = TB(epochs=1)
    init = glorot_init(tb.network, 99)
    start = aggregate_loss(tb.network, init, tb.train)

    trainer = tb.trainer(ScheduleKind.UP)
    _, records = trainer.train(tb.train, tb.test, init)

    assert records[0].train_loss <= start + 1e-12


@pytest.mark.slow
def test_adaptive_schedule_learns_blobs():
    network = NetworkSpec((12, 12, 1), (L.conv2d(3, 3), L.maxpool(), L.flatten(), L.dense(8), L.dense(4)))
    train = synthetic_blobs(4, 30, (12, 12), seed=0)
    test = synthetic_blobs(4, 15, (12, 12), seed=1)

    _, records = scheduled_training_run(network, train, test, 'a-up', n_eval=200, epochs=5, seed=0)

    assert records[-1].train_loss < records[0].train_loss
    assert records[-1].test_acc >= 0.5
