"""

Copyright (c) 2026 evotrain developers

SPDX-License-Identifier: MIT

SHADE alternated with two local searches and a stagnation restart.

"""

import logging
import threading
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .version import __version__
from .constants import LOCAL_SEARCH_ORDER, LocalSearchKind
from .errors import BudgetError, ConfigError
from .parallel import ordered_map
from .restart import Restart
from .shade import Individual, as_bounds, replace_member, shade_best, shade_generation, shade_init

log = logging.getLogger(__name__)

FD_STEP = 1e-6
ARMIJO_C = 1e-4
MAX_HALVINGS = 40
MTS_RESET = 0.4
MTS_MIN_STEP = 1e-15
IMPROVEMENT_EPS = 1e-12


class CountingObjective:
    """Wraps an objective and counts calls, refusing calls past ``limit``."""

    def __init__(self, objective, limit=None):
        self.objective = objective
        self.limit = limit
        self.count = 0
        self._lock = threading.Lock()

    def __call__(self, x):
        with self._lock:
            if self.limit is not None and self.count >= self.limit:
                raise BudgetError(f"evaluation budget of {self.limit} exhausted")
            self.count += 1
        return float(self.objective(x))

    @property
    def remaining(self):
        return None if self.limit is None else self.limit - self.count


def fd_gradient(objective, x, threads=None):
    """Central differences, h = 1e-6 * max(1, |x_d|); costs 2 * dims calls."""
    h = FD_STEP * np.maximum(1.0, np.abs(x))
    points = []
    for d in range(len(x)):
        for sign in (1.0, -1.0):
            p = x.copy()
            p[d] += sign * h[d]
            points.append(p)
    values = np.asarray(ordered_map(objective, points, threads), dtype=np.float64)
    return (values[0::2] - values[1::2]) / (2 * h)


def _two_loop(grad, s_hist, y_hist):
    q = grad.copy()
    stack = []
    for s, y in zip(reversed(s_hist), reversed(y_hist)):
        rho = 1.0 / (y @ s)
        a = rho * (s @ q)
        q -= a * y
        stack.append((rho, a, s, y))
    if s_hist:
        s, y = s_hist[-1], y_hist[-1]
        q *= (s @ y) / (y @ y)
    for rho, a, s, y in reversed(stack):
        b = rho * (y @ q)
        q += s * (a - b)
    return q


def lbfgs_fd(objective, start, budget_evals, bounds, start_fitness=None, history=10, threads=None):
    """Limited-memory BFGS on finite-difference gradients inside ``bounds``.

    Uses at most ``budget_evals`` calls and never returns a point worse than
    ``start``.
    """
    x = np.asarray(start, dtype=np.float64)
    lower, upper = as_bounds(bounds, len(x))
    x = np.clip(x, lower, upper)
    grad_cost = 2 * len(x)

    need = grad_cost + (1 if start_fitness is None else 0)
    if budget_evals < need:
        raise BudgetError(f"L-BFGS needs {need} evaluations for one gradient, budget is {budget_evals}")

    used = 0
    if start_fitness is None:
        f = float(objective(x.copy()))
        used += 1
    else:
        f = float(start_fitness)

    s_hist = deque(maxlen=history)
    y_hist = deque(maxlen=history)

    g = fd_gradient(objective, x, threads)
    used += grad_cost

    while used < budget_evals:
        gnorm = float(np.linalg.norm(g))
        if not np.isfinite(gnorm) or gnorm == 0.0:
            break

        direction = -_two_loop(g, s_hist, y_hist)
        if g @ direction >= 0:
            s_hist.clear()
            y_hist.clear()
            direction = -g

        alpha = 1.0 if s_hist else min(1.0, 1.0 / gnorm)
        accepted = None
        for _ in range(MAX_HALVINGS):
            if used >= budget_evals:
                break
            x_new = np.clip(x + alpha * direction, lower, upper)
            step = x_new - x
            if not step.any():
                break
            f_new = float(objective(x_new.copy()))
            used += 1
            if f_new <= f + ARMIJO_C * min(float(g @ step), 0.0) and f_new <= f:
                accepted = x_new, f_new
                break
            alpha *= 0.5

        if accepted is None:
            break

        x_new, f_new = accepted
        if budget_evals - used < grad_cost:
            x, f = x_new, f_new
            break

        g_new = fd_gradient(objective, x_new, threads)
        used += grad_cost
        s = x_new - x
        y = g_new - g
        if s @ y > IMPROVEMENT_EPS * (y @ y):
            s_hist.append(s)
            y_hist.append(y)
        x, f, g = x_new, f_new, g_new

    log.debug("L-BFGS finished at %.6g after %d of %d evaluations", f, used, budget_evals)
    return Individual(x, f)


class MtsResult(NamedTuple):
    best: Individual
    steps: np.ndarray
    next_dim: int


def mts_ls1(objective, start, budget_evals, bounds, step_init=None, start_fitness=None, start_dim=0):
    """Coordinate-wise MTS-LS1 sweeps; consumes exactly ``budget_evals`` calls.

    ``step_init`` is a scalar or per-dimension search range, default
    0.2 * (upper - lower).  Returns the best point, the final search ranges and
    the dimension the next sweep would probe.
    """
    if budget_evals < 1:
        raise BudgetError("MTS-LS1 needs at least one evaluation")

    x = np.asarray(start, dtype=np.float64)
    dims = len(x)
    lower, upper = as_bounds(bounds, dims)
    span = upper - lower
    x = np.clip(x, lower, upper)

    if step_init is None:
        sr = 0.2 * span
    else:
        sr = np.broadcast_to(np.asarray(step_init, dtype=np.float64), (dims,)).copy()

    used = 0
    if start_fitness is None:
        f = float(objective(x.copy()))
        used += 1
    else:
        f = float(start_fitness)

    d = start_dim % dims
    while used < budget_evals:
        original = x[d]
        improved = False

        x[d] = np.clip(original - sr[d], lower[d], upper[d])
        trial = float(objective(x.copy()))
        used += 1
        if trial < f:
            f = trial
            improved = True
        else:
            x[d] = original
            if used >= budget_evals:
                break
            x[d] = np.clip(original + 0.5 * sr[d], lower[d], upper[d])
            trial = float(objective(x.copy()))
            used += 1
            if trial < f:
                f = trial
                improved = True
            else:
                x[d] = original

        if not improved:
            sr[d] *= 0.5
            if sr[d] < MTS_MIN_STEP:
                sr[d] = MTS_RESET * span[d]
        d = (d + 1) % dims

    return MtsResult(Individual(x, f), sr, d)


def relative_improvement(before, after):
    return (before - after) / max(abs(before), IMPROVEMENT_EPS)


@dataclass
class IlsState:
    incumbent: Individual
    shade: object
    ls_improvement: dict = field(default_factory=lambda: {k: 0.0 for k in LocalSearchKind})
    ls_warmup_done: dict = field(default_factory=lambda: {k: False for k in LocalSearchKind})
    ls_enabled: dict = field(default_factory=lambda: {k: True for k in LocalSearchKind})
    stagnation_counter: int = 0
    eval_count: int = 0
    restarts: int = 0


def choose_local_search(state):
    enabled = [k for k in LOCAL_SEARCH_ORDER if state.ls_enabled.get(k, True)]
    if not enabled:
        raise ConfigError("no local search is enabled")
    for kind in enabled:
        if not state.ls_warmup_done.get(kind, False):
            return kind
    # max() keeps the first of equal keys, so LBFGS_FD wins exact ties
    return max(enabled, key=lambda k: state.ls_improvement.get(k, 0.0))


class ShadeIls(Restart):

    def __init__(self, objective, dims, bounds, np_size=10, frac_global=0.5, chunk_evals=None,
            restart_threshold=0.05, restart_patience=3, restart_width=0.1, mts_step=0.2,
            lbfgs_history=10, seed=None, threads=None, init=None, init_width=None,
            local_searches=LOCAL_SEARCH_ORDER):
        self.log = logging.getLogger(f"evotrain.{type(self).__name__}")
        self.objective = objective
        self.dims = dims
        self.lower, self.upper = as_bounds(bounds, dims)
        self.np_size = np_size
        self.frac_global = frac_global
        self.chunk_evals = chunk_evals
        self.restart_width = restart_width
        self.mts_step = mts_step
        self.lbfgs_history = lbfgs_history
        self.rng = np.random.default_rng(seed)
        self.threads = threads
        self.init = init
        self.init_width = init_width
        self.local_searches = tuple(LocalSearchKind(k) for k in local_searches)

        if not 0.0 <= frac_global <= 1.0:
            raise ConfigError(f"frac_global must be in [0, 1], got {frac_global}")
        if not self.local_searches:
            raise ConfigError("at least one local search is required")

        self.log.debug("SHADE-ILS solver")
        self.log.debug("evotrain version %s", __version__)
        self.log.debug("%d dims, NP=%d, frac_global=%.2f", dims, np_size, frac_global)

        self._init_restart(restart_threshold, restart_patience)

        self.state = None
        self.trace = []
        self._counter = None
        self._mts_steps = None
        self._mts_dim = 0

    @property
    def eval_count(self):
        return 0 if self._counter is None else self._counter.count

    @property
    def span(self):
        return self.upper - self.lower

    def _reset_mts(self):
        self._mts_steps = np.full(self.dims, self.mts_step) * self.span
        self._mts_dim = 0

    def _record(self):
        self.state.eval_count = self._counter.count
        self.state.stagnation_counter = self.stagnation_counter
        self.trace.append((self._counter.count, float(self.state.incumbent.fitness)))

    def _accept(self, candidate):
        if candidate.fitness < self.state.incumbent.fitness:
            self.state.incumbent = candidate.copy()

    def _handle_restart(self):
        remaining = self._counter.remaining
        if remaining < self.np_size - 1:
            self.log.debug("Restart skipped, %d evaluations left", remaining)
            return
        self.log.debug("Restart %d around incumbent %.6g", self.restart_count, self.state.incumbent.fitness)
        self.state.shade = shade_init(self._counter, self.dims, self.np_size, (self.lower, self.upper),
            init=self.state.incumbent.position, init_width=self.restart_width * self.span,
            max_evals=remaining, threads=self.threads, rng=self.rng,
            init_fitness=self.state.incumbent.fitness)
        self.state.restarts += 1
        self._reset_mts()

    def _global_phase(self, end):
        shade = self.state.shade
        while self._counter.count < end:
            shade_generation(shade, self._counter, shade.eval_count + end - self._counter.count, self.threads)
        self._accept(shade_best(shade))

    def _local_phase(self, budget):
        state = self.state
        if (LocalSearchKind.LBFGS_FD in self.local_searches and state.ls_enabled[LocalSearchKind.LBFGS_FD]
                and budget < 2 * self.dims + 1):
            self.log.warning("L-BFGS needs %d evaluations per call, local budget is %d; using MTS-LS1 only",
                2 * self.dims + 1, budget)
            state.ls_enabled[LocalSearchKind.LBFGS_FD] = False
            if LocalSearchKind.MTS_LS1 not in self.local_searches:
                raise BudgetError(f"local budget {budget} cannot cover one L-BFGS gradient")

        kind = choose_local_search(state)
        start = state.incumbent
        self.log.debug("Local search %s from %.6g with %d evaluations", kind.value, start.fitness, budget)

        if kind is LocalSearchKind.LBFGS_FD:
            result = lbfgs_fd(self._counter, start.position, budget, (self.lower, self.upper),
                start_fitness=start.fitness, history=self.lbfgs_history, threads=self.threads)
        else:
            result, self._mts_steps, self._mts_dim = mts_ls1(self._counter, start.position, budget,
                (self.lower, self.upper), self._mts_steps, start.fitness, self._mts_dim)

        ratio = relative_improvement(start.fitness, result.fitness)
        state.ls_improvement[kind] = ratio
        state.ls_warmup_done[kind] = True
        self._accept(result)

        shade = state.shade
        best = int(np.argmin(shade.fitness))
        if result.fitness <= shade.fitness[best]:
            replace_member(shade, best, result)

        return ratio

    def run(self, total_evals):
        min_evals = self.np_size
        if total_evals < min_evals:
            raise BudgetError(f"SHADE-ILS needs at least {min_evals} evaluations, got {total_evals}")

        chunk = self.chunk_evals
        if chunk is None:
            chunk = max(2 * (self.np_size + 1), total_evals // 10)
        if chunk <= self.np_size:
            raise ConfigError(f"chunk_evals must exceed the population size, got {chunk}")

        self._counter = CountingObjective(self.objective, total_evals)
        self._reset_mts()
        self.stagnation_counter = 0
        self.trace = []

        shade = shade_init(self._counter, self.dims, self.np_size, (self.lower, self.upper),
            init=self.init, init_width=self.init_width, max_evals=total_evals,
            threads=self.threads, rng=self.rng)
        enabled = {k: k in self.local_searches for k in LocalSearchKind}
        self.state = IlsState(incumbent=shade_best(shade), shade=shade, ls_enabled=enabled)
        self._record()

        # the initial population belongs to the first global phase
        iter_start = 0
        while self._counter.count < total_evals:
            iter_end = min(iter_start + chunk, total_evals)
            self._global_phase(iter_start + int(self.frac_global * (iter_end - iter_start)))
            self._record()

            budget = iter_end - self._counter.count
            iter_start = self._counter.count
            if budget > 0:
                ratio = self._local_phase(budget)
                iter_start = self._counter.count
                self.register_improvement(ratio)
                self._record()

        assert self._counter.count <= total_evals
        self.log.debug("SHADE-ILS best %.6g after %d evaluations, %d restarts",
            self.state.incumbent.fitness, self._counter.count, self.restart_count)
        return self.state.incumbent.copy(), list(self.trace)


def shade_ils_run(objective, dims, bounds, total_evals, frac_global=0.5, seed=None, init=None,
        init_width=None, np_size=10, threads=None, **kwargs):
    solver = ShadeIls(objective, dims, bounds, np_size=np_size, frac_global=frac_global, seed=seed,
        threads=threads, init=init, init_width=init_width, **kwargs)
    return solver.run(total_evals)
