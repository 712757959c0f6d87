"""

Copyright (c) 2026 evotrain developers

SPDX-License-Identifier: MIT

Success-history based adaptive differential evolution (SHADE), minimizing.

"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetError, ConfigError
from .parallel import ordered_map

log = logging.getLogger(__name__)

MEMORY_INIT = 0.5
MEMORY_FLOOR = 1e-6
F_SCALE = 0.1
CR_SIGMA = 0.1


@dataclass
class Individual:
    position: np.ndarray
    fitness: float

    def copy(self):
        return Individual(np.array(self.position, dtype=np.float64), float(self.fitness))


@dataclass
class ShadeState:
    population: np.ndarray
    fitness: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    rng: np.random.Generator
    memory_f: np.ndarray
    memory_cr: np.ndarray
    memory_index: int = 0
    archive: list = field(default_factory=list)
    eval_count: int = 0
    generation: int = 0
    p_rate: float = 0.1

    @property
    def np_size(self):
        return len(self.population)

    @property
    def dims(self):
        return self.population.shape[1]

    @property
    def archive_capacity(self):
        return self.np_size

    def member(self, index):
        return Individual(self.population[index].copy(), float(self.fitness[index]))

    def members(self):
        return [self.member(i) for i in range(self.np_size)]


def as_bounds(bounds, dims):
    """Broadcast (lower, upper) scalars or arrays to per-dimension arrays."""
    lower, upper = bounds
    lower = np.broadcast_to(np.asarray(lower, dtype=np.float64), (dims,)).copy()
    upper = np.broadcast_to(np.asarray(upper, dtype=np.float64), (dims,)).copy()
    if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
        raise ConfigError("bounds must be finite")
    if np.any(upper <= lower):
        raise ConfigError("every upper bound must exceed its lower bound")
    return lower, upper


def evaluate_all(objective, positions, threads=None):
    values = ordered_map(lambda x: float(objective(x)), list(positions), threads)
    values = np.asarray(values, dtype=np.float64)
    values[np.isnan(values)] = np.inf
    return values


def shade_init(objective, dims, np_size, bounds, seed=None, init=None, init_width=None,
        max_evals=None, threads=None, rng=None, p_rate=0.1, init_fitness=None):
    """Evaluate a first population, uniform in bounds or around ``init``.

    When ``init`` is given it is member 0 unchanged and the other members are
    uniform perturbations of width ``init_width`` around it, clipped to bounds.
    A known ``init_fitness`` is taken as member 0's fitness without evaluating it.
    """
    if np_size < 4:
        raise ConfigError(f"population size must be at least 4, got {np_size}")
    if init_fitness is not None and init is None:
        raise ConfigError("init_fitness needs an init vector")
    needed = np_size if init_fitness is None else np_size - 1
    if max_evals is not None and needed > max_evals:
        raise BudgetError(f"population of {np_size} needs {needed} evaluations, budget is {max_evals}")

    lower, upper = as_bounds(bounds, dims)
    if rng is None:
        rng = np.random.default_rng(seed)

    if init is None:
        population = lower + (upper - lower) * rng.random((np_size, dims))
    else:
        center = np.clip(np.asarray(init, dtype=np.float64), lower, upper)
        if init_width is None:
            init_width = 0.1 * (upper - lower)
        noise = (rng.random((np_size - 1, dims)) - 0.5) * init_width
        population = np.vstack([center, np.clip(center + noise, lower, upper)])

    if init_fitness is None:
        fitness = evaluate_all(objective, population, threads)
    else:
        fitness = np.concatenate([[float(init_fitness)], evaluate_all(objective, population[1:], threads)])

    return ShadeState(
        population=population,
        fitness=fitness,
        lower=lower,
        upper=upper,
        rng=rng,
        memory_f=np.full(np_size, MEMORY_INIT),
        memory_cr=np.full(np_size, MEMORY_INIT),
        eval_count=needed,
        p_rate=p_rate,
    )


def sample_f(means, rng):
    """Cauchy around each mean, resampled while non-positive, capped at 1."""
    f = means + F_SCALE * rng.standard_cauchy(len(means))
    bad = f <= 0
    while bad.any():
        f[bad] = means[bad] + F_SCALE * rng.standard_cauchy(int(bad.sum()))
        bad = f <= 0
    return np.minimum(f, 1.0)


def sample_cr(means, rng):
    return np.clip(rng.normal(means, CR_SIGMA), 0.0, 1.0)


def current_to_pbest(x, pbest, r1, r2, f):
    return x + f * (pbest - x) + f * (r1 - r2)


def binomial_crossover(target, mutant, cr, rng):
    mask = rng.random(len(target)) < cr
    mask[rng.integers(len(target))] = True
    return np.where(mask, mutant, target)


def reflect_bounds(trial, parent, lower, upper):
    """Move violating coordinates halfway between the parent and the bound."""
    trial = np.where(trial < lower, (parent + lower) / 2, trial)
    return np.where(trial > upper, (parent + upper) / 2, trial)


def lehmer_mean(values, weights):
    values = np.asarray(values, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    return float(np.sum(weights * values**2) / np.sum(weights * values))


def update_memory(state, success_f, success_cr, delta):
    weights = np.asarray(delta, dtype=np.float64)
    weights = weights / weights.sum()
    k = state.memory_index
    state.memory_f[k] = max(lehmer_mean(success_f, weights), MEMORY_FLOOR)
    state.memory_cr[k] = max(float(np.sum(weights * np.asarray(success_cr))), MEMORY_FLOOR)
    state.memory_index = (k + 1) % len(state.memory_f)


def _pick_other(rng, n, exclude):
    while True:
        j = int(rng.integers(n))
        if j not in exclude:
            return j


def shade_generation(state, objective, max_evals, threads=None):
    """One generation of current-to-pbest/1/bin, stopping at ``max_evals``.

    Updates ``state`` in place and returns it.
    """
    budget = max_evals - state.eval_count
    if budget <= 0:
        return state

    rng = state.rng
    pop = state.population
    n, dims = pop.shape

    slots = rng.integers(0, len(state.memory_f), n)
    f = sample_f(state.memory_f[slots], rng)
    cr = sample_cr(state.memory_cr[slots], rng)

    p_count = max(2, math.ceil(state.p_rate * n))
    top = np.argsort(state.fitness, kind='stable')[:p_count]
    union = pop if not state.archive else np.vstack([pop, np.asarray(state.archive)])

    trials = np.empty_like(pop)
    for i in range(n):
        candidates = top[top != i]
        pbest = int(candidates[rng.integers(len(candidates))])
        r1 = _pick_other(rng, n, {i})
        r2 = _pick_other(rng, len(union), {i, r1})
        mutant = current_to_pbest(pop[i], pop[pbest], pop[r1], union[r2], f[i])
        trial = binomial_crossover(pop[i], mutant, cr[i], rng)
        trials[i] = reflect_bounds(trial, pop[i], state.lower, state.upper)

    count = min(n, budget)
    trial_fitness = evaluate_all(objective, trials[:count], threads)
    state.eval_count += count

    success_f, success_cr, delta = [], [], []
    for i in range(count):
        if trial_fitness[i] <= state.fitness[i]:
            if trial_fitness[i] < state.fitness[i]:
                state.archive.append(pop[i].copy())
                if len(state.archive) > state.archive_capacity:
                    state.archive.pop(int(rng.integers(len(state.archive))))
                success_f.append(f[i])
                success_cr.append(cr[i])
                delta.append(state.fitness[i] - trial_fitness[i])
            pop[i] = trials[i]
            state.fitness[i] = trial_fitness[i]

    if success_f:
        update_memory(state, success_f, success_cr, delta)

    state.generation += 1
    log.debug("SHADE generation %d: best %.6g, %d successes, %d evals",
        state.generation, state.fitness.min(), len(success_f), state.eval_count)
    return state


def shade_best(state):
    # argmin returns the lowest index on ties
    return state.member(int(np.argmin(state.fitness)))


def replace_member(state, index, individual):
    state.population[index] = individual.position
    state.fitness[index] = individual.fitness


def run_shade(objective, dims, bounds, max_evals, np_size=100, seed=None, threads=None):
    """SHADE on its own until ``max_evals``; returns (best, trace)."""
    state = shade_init(objective, dims, np_size, bounds, seed, max_evals=max_evals, threads=threads)
    trace = [(state.eval_count, float(state.fitness.min()))]
    while state.eval_count < max_evals:
        shade_generation(state, objective, max_evals, threads)
        trace.append((state.eval_count, float(state.fitness.min())))
    return shade_best(state), trace
