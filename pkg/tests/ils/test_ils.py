#!/usr/bin/env python
"""

Copyright (c) 2026 evotrain developers

SPDX-License-Identifier: MIT

"""

import numpy as np
import pytest

from evotrain.constants import LocalSearchKind
from evotrain.errors import BudgetError, ConfigError
from evotrain.ils import (CountingObjective, IlsState, ShadeIls, choose_local_search, fd_gradient, lbfgs_fd,
    mts_ls1, relative_improvement, shade_ils_run)
from evotrain.shade import Individual, run_shade

LBFGS = LocalSearchKind.LBFGS_FD
MTS = LocalSearchKind.MTS_LS1


def sphere(x):
    return float(np.sum(np.square(x)))


def rosenbrock(x):
    return float(100 * (x[1] - x[0]**2)**2 + (1 - x[0])**2)


def rastrigin(x):
    return float(10 * len(x) + np.sum(x * x - 10 * np.cos(2 * np.pi * x)))


def test_counting_objective_limit():
    counter = CountingObjective(sphere, 2)
    counter(np.zeros(2))
    counter(np.ones(2))
    assert counter.count == 2
    assert counter.remaining == 0
    with pytest.raises(BudgetError):
        counter(np.zeros(2))


def test_fd_gradient_quadratic():
    g = fd_gradient(lambda x: float(x[0]**2), np.array([1.0]))
    assert g[0] == pytest.approx(2.0, abs=1e-6)

    x = np.array([3.0, -0.5, 0.0])
    assert np.allclose(fd_gradient(sphere, x), 2 * x, atol=1e-5)


def test_lbfgs_sphere():
    counter = CountingObjective(sphere)
    result = lbfgs_fd(counter, np.array([1.0, 1.0]), 200, (-5, 5))

    assert result.fitness <= 1e-8
    assert result.fitness == sphere(result.position)
    assert counter.count <= 200


def test_lbfgs_rosenbrock():
    result = lbfgs_fd(rosenbrock, np.array([-1.2, 1.0]), 4000, (-5, 5))
    assert result.fitness < 1e-6


def test_lbfgs_budget_error():
    with pytest.raises(BudgetError):
        lbfgs_fd(sphere, np.ones(5), 10, (-1, 1))
    with pytest.raises(BudgetError):
        lbfgs_fd(sphere, np.ones(5), 9, (-1, 1), start_fitness=5.0)


def test_lbfgs_exact_gradient_budget():
    counter = CountingObjective(sphere, 10)
    result = lbfgs_fd(counter, np.ones(5), 10, (-2, 2), start_fitness=5.0)
    assert counter.count == 10
    assert result.fitness == 5.0


@pytest.mark.parametrize("seed", range(5))
def test_lbfgs_never_worse(seed):
    rng = np.random.default_rng(seed)
    start = rng.uniform(-5.12, 5.12, 6)
    counter = CountingObjective(rastrigin, 150)

    result = lbfgs_fd(counter, start, 150, (-5.12, 5.12))

    assert result.fitness <= rastrigin(start)
    assert np.all(np.abs(result.position) <= 5.12)


def test_mts_first_probe():
    calls = CountingObjective(lambda x: float(x[0]**2))
    result = mts_ls1(calls, np.array([1.0]), 1, (-2, 2), step_init=0.5, start_fitness=1.0)

    assert calls.count == 1
    assert result.best.position.tolist() == [0.5]
    assert result.best.fitness == 0.25


def test_mts_at_optimum_halves_steps():
    counter = CountingObjective(sphere)
    result = mts_ls1(counter, np.zeros(3), 6, (-1, 1), start_fitness=0.0)

    assert counter.count == 6
    assert result.best.fitness == 0.0
    assert np.array_equal(result.best.position, np.zeros(3))
    assert np.allclose(result.steps, 0.5 * 0.2 * 2)
    assert result.next_dim == 0


def test_mts_budget_accounting():
    with pytest.raises(BudgetError):
        mts_ls1(sphere, np.ones(2), 0, (-1, 1))

    counter = CountingObjective(sphere)
    result = mts_ls1(counter, np.ones(2), 1, (-1, 1))
    assert counter.count == 1
    assert result.best.fitness == 2.0

    for budget in (2, 7, 31):
        counter = CountingObjective(sphere)
        mts_ls1(counter, np.ones(4), budget, (-2, 2))
        assert counter.count == budget


def test_mts_step_reset():
    result = mts_ls1(sphere, np.zeros(1), 200, (-1, 1), start_fitness=0.0)
    assert result.steps[0] >= 1e-15
    assert result.steps[0] <= 0.4 * 2


def test_mts_resumes_at_dimension():
    counter = CountingObjective(sphere)
    result = mts_ls1(counter, np.ones(4), 2, (-1, 1), start_fitness=4.0, start_dim=2)
    assert result.best.position[:2].tolist() == [1.0, 1.0]
    assert result.best.position[2] < 1.0
    assert result.best.position[3] < 1.0
    assert result.next_dim == 0


def test_relative_improvement():
    assert relative_improvement(2.0, 1.0) == 0.5
    assert relative_improvement(0.0, 0.0) == 0.0
    assert relative_improvement(-2.0, -3.0) == 0.5


def ils_state(improvement, warm):
    return IlsState(Individual(np.zeros(1), 0.0), None, ls_improvement=improvement, ls_warmup_done=warm)


@pytest.mark.parametrize("improvement, warm, expected", [
    ({LBFGS: 0.30, MTS: 0.10}, {LBFGS: True, MTS: True}, LBFGS),
    ({LBFGS: 0.10, MTS: 0.30}, {LBFGS: True, MTS: True}, MTS),
    ({LBFGS: 0.90, MTS: 0.00}, {LBFGS: True, MTS: False}, MTS),
    ({LBFGS: 0.00, MTS: 0.00}, {LBFGS: False, MTS: False}, LBFGS),
    ({LBFGS: 0.20, MTS: 0.20}, {LBFGS: True, MTS: True}, LBFGS),
])
def test_choose_local_search(improvement, warm, expected):
    assert choose_local_search(ils_state(improvement, warm)) is expected


def test_choose_respects_disabled():
    state = ils_state({LBFGS: 0.9, MTS: 0.1}, {LBFGS: True, MTS: True})
    state.ls_enabled[LBFGS] = False
    assert choose_local_search(state) is MTS
    state.ls_enabled[MTS] = False
    with pytest.raises(ConfigError):
        choose_local_search(state)


@pytest.mark.parametrize("seed", range(3))
def test_run_budget_and_trace(seed):
    counter = CountingObjective(rastrigin)
    solver = ShadeIls(counter, 10, (-5.12, 5.12), np_size=10, seed=seed)

    best, trace = solver.run(3000)

    assert counter.count == 3000
    assert solver.eval_count == 3000
    assert best.fitness == rastrigin(best.position)
    assert trace[-1][1] == best.fitness
    assert all(a[1] >= b[1] for a, b in zip(trace, trace[1:]))
    assert all(a[0] <= b[0] for a, b in zip(trace, trace[1:]))
    assert solver.state.ls_warmup_done[LBFGS] and solver.state.ls_warmup_done[MTS]


def test_run_is_deterministic():
    a = shade_ils_run(rastrigin, 8, (-5.12, 5.12), 1500, seed=3, threads=1)
    b = shade_ils_run(rastrigin, 8, (-5.12, 5.12), 1500, seed=3, threads=4)
    assert a[1] == b[1]
    assert np.array_equal(a[0].position, b[0].position)


def test_run_keeps_good_init():
    best, _ = shade_ils_run(sphere, 5, (-1, 1), 300, seed=0, init=np.zeros(5), init_width=0.5)
    assert best.fitness == 0.0


def test_restart_on_flat_objective():
    solver = ShadeIls(lambda x: 1.0, 2, (-1, 1), np_size=4, seed=0)
    best, trace = solver.run(400)

    assert solver.restart_count >= 1
    assert solver.state.restarts >= 1
    assert best.fitness == 1.0
    assert solver.eval_count == 400


def test_restart_reuses_incumbent_fitness():
    calls = []

    def flat(x):
        calls.append(np.array(x))
        return 1.0

    solver = ShadeIls(flat, 2, (-1, 1), np_size=4, seed=0, local_searches=('mts',))
    best, _ = solver.run(400)

    assert solver.restart_count >= 1
    assert len(calls) == solver.eval_count == 400
    # the incumbent is evaluated once, when it is first sampled
    assert sum(np.array_equal(x, best.position) for x in calls) == 1


def test_run_budget_equal_to_population():
    solver = ShadeIls(sphere, 3, (-1, 1), np_size=10, seed=0)
    best, _ = solver.run(10)

    assert solver.eval_count == 10
    assert best.fitness == sphere(best.position)


def test_run_errors():
    with pytest.raises(BudgetError):
        ShadeIls(sphere, 3, (-1, 1), np_size=10).run(9)
    with pytest.raises(ConfigError):
        ShadeIls(sphere, 3, (-1, 1), np_size=10, chunk_evals=10).run(100)
    with pytest.raises(ConfigError):
        ShadeIls(sphere, 3, (-1, 1), frac_global=1.5)
    with pytest.raises(BudgetError):
        ShadeIls(sphere, 50, (-1, 1), np_size=10, local_searches=('lbfgs',)).run(100)


def test_small_budget_falls_back_to_mts(caplog):
    solver = ShadeIls(sphere, 50, (-1, 1), np_size=10, seed=0)
    with caplog.at_level("WARNING"):
        best, _ = solver.run(200)
    assert not solver.state.ls_enabled[LBFGS]
    assert solver.eval_count == 200
    assert "L-BFGS" in caplog.text


@pytest.mark.slow
def test_rastrigin_beats_shade_alone():
    ils, shade = [], []
    for seed in range(10):
        ils.append(shade_ils_run(rastrigin, 50, (-5.12, 5.12), 100000, seed=seed, np_size=100)[0].fitness)
        shade.append(run_shade(rastrigin, 50, (-5.12, 5.12), 100000, np_size=100, seed=seed)[0].fitness)
    assert np.median(ils) < np.median(shade)
