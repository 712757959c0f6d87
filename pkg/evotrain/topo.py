"""

Copyright (c) 2026 evotrain developers

SPDX-License-Identifier: MIT

(mu + lambda) evolution of network topologies and training settings.

A genome is a layer list plus a TrainingConfig.  Legal layer orders follow a
two-state machine over tensor rank: SPATIAL (H, W, C) and FLAT (N).

"""

import dataclasses
import functools
import hashlib
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Optional

import numpy as np
import yaml

from .version import __version__
from .constants import FsmState, LayerKind, LossKind, OptimizerKind, default_learning_rate, fsm_transitions
from .data import split_train_val
from .errors import ConfigError, EvotrainError, ShapeError, TrainingError
from .gradient import TrainingConfig, train_gradient
from .netspec import input_shape_from_entry, layer_to_entry, layers_from_entries, network_to_document
from .network import LayerSpec, NetworkSpec, accuracy, count_params, evaluate, infer_shapes, layer_output_shape
from .parallel import ordered_map

log = logging.getLogger(__name__)

FAST_EPOCH_CAP = 10
MAX_SAMPLE_TRIES = 32

kind_names = {
    LayerKind.CONV2D:  "Conv2D",
    LayerKind.MAXPOOL: "MaxPool",
    LayerKind.AVGPOOL: "AvgPool",
    LayerKind.DENSE:   "Dense",
    LayerKind.DROPOUT: "Dropout",
    LayerKind.FLATTEN: "Flatten",
    LayerKind.RESHAPE: "Reshape",
}


def _lattice(start, stop, step):
    return tuple(range(start, stop + 1, step))


@dataclass(frozen=True)
class SearchSpace:
    filters: tuple = _lattice(4, 64, 4)
    kernels: tuple = (2, 3, 4, 5)
    units: tuple = _lattice(10, 500, 10)
    rates: tuple = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7)
    epochs: tuple = _lattice(2, 20, 2)
    batch_sizes: tuple = _lattice(100, 5000, 100)
    optimizers: tuple = tuple(k.value for k in OptimizerKind)
    min_depth: int = 3
    max_depth: int = 20
    reshape_weight: float = 0.05

    def __post_init__(self):
        for name in ('filters', 'kernels', 'units', 'rates', 'epochs', 'batch_sizes', 'optimizers'):
            values = tuple(getattr(self, name))
            if not values:
                raise ConfigError(f"search lattice '{name}' is empty")
            object.__setattr__(self, name, values)
        try:
            object.__setattr__(self, 'optimizers', tuple(OptimizerKind(o).value for o in self.optimizers))
        except ValueError:
            raise ConfigError(f"unknown optimizer in {self.optimizers!r}") from None
        if not 3 <= self.min_depth <= self.max_depth:
            raise ConfigError(f"depth range [{self.min_depth}, {self.max_depth}] must start at 3 or more")
        if min(self.kernels) < 1 or not all(0.0 <= r < 1.0 for r in self.rates):
            raise ConfigError("kernels must be positive and dropout rates in [0, 1)")
        if self.reshape_weight < 0:
            raise ConfigError("reshape_weight must be non-negative")


@dataclass(frozen=True)
class EaConfig:
    lambda_: int = 10
    mu: int = 5
    cxpb: float = 0.5
    mutpb: float = 0.5
    newpb: float = 0.5
    ngen: int = 20
    stagnation_limit: int = 5
    seed: int = 0
    fast: bool = False
    param_cap: Optional[int] = None
    split_fraction: float = 0.8
    space: SearchSpace = field(default_factory=SearchSpace)

    def __post_init__(self):
        if not self.lambda_ >= self.mu >= 1:
            raise ConfigError(f"need lambda >= mu >= 1, got lambda={self.lambda_}, mu={self.mu}")
        for name in ('cxpb', 'mutpb', 'newpb'):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {getattr(self, name)}")
        if self.ngen < 0 or self.stagnation_limit < 1:
            raise ConfigError("ngen must be non-negative and stagnation_limit positive")
        if self.param_cap is not None and self.param_cap < 1:
            raise ConfigError(f"param_cap must be positive, got {self.param_cap}")

    @property
    def evaluation_budget(self):
        return self.mu + self.lambda_ * self.ngen


@dataclass(frozen=True)
class Genome:
    training: TrainingConfig
    layers: tuple

    def __post_init__(self):
        object.__setattr__(self, 'layers', tuple(self.layers))

    def __len__(self):
        return len(self.layers)

    def network(self, input_shape):
        return NetworkSpec(input_shape, self.layers, LossKind.CATEGORICAL_CE)

    @functools.cached_property
    def key(self):
        """Stable content hash, used for caching and rank tie-breaks."""
        doc = {
            'training': training_to_entry(self.training),
            'layers': [layer_to_entry(layer) for layer in self.layers],
        }
        text = yaml.safe_dump(doc, sort_keys=True)
        return hashlib.sha256(text.encode()).hexdigest()

    def __repr__(self):
        t = self.training
        body = "-".join(repr(layer) for layer in self.layers)
        return f"Genome({t.optimizer.value}, epochs={t.epochs}, batch={t.batch_size}: {body})"


@dataclass(frozen=True)
class EvaluatedGenome:
    genome: Genome
    fitness: float
    model_params: int
    wall_ms: int
    train_loss: Optional[float] = None
    train_acc: Optional[float] = None
    test_acc: Optional[float] = None
    test_loss: Optional[float] = None


class GenerationStats(NamedTuple):
    generation: int
    best_fitness: float
    mean_fitness: float
    evaluations: int


# genome documents

def training_to_entry(training):
    return {
        'optimizer': training.optimizer.value,
        'learning_rate': training.learning_rate,
        'epochs': training.epochs,
        'batch_size': training.batch_size,
    }


def training_from_entry(entry):
    if not isinstance(entry, dict):
        raise ConfigError("training block must be a mapping")
    extra = set(entry) - {'optimizer', 'learning_rate', 'epochs', 'batch_size'}
    if extra:
        raise ConfigError(f"unexpected training keys: {sorted(extra)}")
    optimizer = entry.get('optimizer', OptimizerKind.ADAM.value)
    try:
        optimizer = OptimizerKind(str(optimizer).lower())
    except ValueError:
        raise ConfigError(f"unknown optimizer {optimizer!r}") from None
    try:
        return TrainingConfig(
            optimizer=optimizer,
            learning_rate=float(entry.get('learning_rate', default_learning_rate[optimizer])),
            batch_size=int(entry.get('batch_size', 32)),
            epochs=int(entry.get('epochs', 1)),
        )
    except EvotrainError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad training block {entry!r}: {exc}") from None


def genome_to_document(genome, input_shape):
    doc = network_to_document(genome.network(input_shape))
    doc['training'] = training_to_entry(genome.training)
    return doc


def genome_from_document(doc):
    """Returns (genome, input_shape)."""
    if not isinstance(doc, dict) or 'training' not in doc:
        raise ConfigError("genome document needs a 'training' block")
    for key in ('input_shape', 'layers'):
        if key not in doc:
            raise ConfigError(f"genome document is missing '{key}'")
    layers = layers_from_entries(doc['layers'])
    return Genome(training_from_entry(doc['training']), layers), input_shape_from_entry(doc['input_shape'])


def dump_genome(genome, input_shape):
    return yaml.safe_dump(genome_to_document(genome, input_shape), sort_keys=False, default_flow_style=None)


def load_genome(source):
    if isinstance(source, Path) or (isinstance(source, str) and '\n' not in source and Path(source).is_file()):
        source = Path(source).read_text()
    return genome_from_document(yaml.safe_load(source))


# state machine

def _next_state(state, kind):
    return fsm_transitions[state].get(kind)


def validate_genome(genome, input_shape, num_classes, space=None):
    """List of violations, empty when the genome is valid.

    With ``space`` given, every hyper-parameter must also sit on its lattice.
    """
    violations = []
    layers = genome.layers
    space = space or SearchSpace()

    if not space.min_depth <= len(layers) <= space.max_depth:
        violations.append(f"depth {len(layers)} outside [{space.min_depth}, {space.max_depth}]")

    state = FsmState.SPATIAL
    for index, layer in enumerate(layers):
        following = _next_state(state, layer.kind)
        if following is None:
            violations.append(f"{kind_names[layer.kind]} in {state.name} state (layer {index})")
            continue
        state = following

    if not layers or layers[-1].kind is not LayerKind.DENSE:
        violations.append("final layer must be Dense")
    elif layers[-1].units != num_classes:
        violations.append(f"final Dense has {layers[-1].units} units, expected {num_classes}")
    if state is not FsmState.FLAT:
        violations.append(f"network ends in {state.name} state")

    if not violations:
        try:
            infer_shapes(genome.network(input_shape))
        except ShapeError as exc:
            violations.append(f"shape: {exc}")

    return violations


def check_lattices(genome, space):
    """Lattice violations of a genome's hyper-parameters."""
    violations = []
    t = genome.training
    if t.optimizer.value not in space.optimizers:
        violations.append(f"optimizer {t.optimizer.value} not in search space")
    if t.epochs not in space.epochs:
        violations.append(f"epochs {t.epochs} off lattice")
    if t.batch_size not in space.batch_sizes:
        violations.append(f"batch_size {t.batch_size} off lattice")
    for index, layer in enumerate(genome.layers[:-1]):
        if layer.kind is LayerKind.CONV2D:
            if layer.filters not in space.filters or layer.kernel[0] not in space.kernels:
                violations.append(f"{layer!r} (layer {index}) off lattice")
        elif layer.kind is LayerKind.DENSE and layer.units not in space.units:
            violations.append(f"{layer!r} (layer {index}) off lattice")
        elif layer.kind is LayerKind.DROPOUT and not any(np.isclose(layer.rate, r) for r in space.rates):
            violations.append(f"{layer!r} (layer {index}) off lattice")
    return violations


def _pick(rng, values):
    return values[int(rng.integers(len(values)))]


def _reshape_targets(n):
    return [(h, n // h, 1) for h in range(2, n // 2 + 1) if n % h == 0 and n // h >= 2]


def sample_layer(rng, state, shape, space, kinds=None):
    """Random layer legal in ``state`` for an input of ``shape``, or None."""
    options = []
    for kind in fsm_transitions[state]:
        if kinds is not None and kind not in kinds:
            continue
        if kind is LayerKind.CONV2D:
            if min(shape[:2]) >= min(space.kernels):
                options.append(kind)
        elif kind is LayerKind.MAXPOOL:
            if min(shape[:2]) >= 2:
                options.append(kind)
        elif kind is LayerKind.RESHAPE:
            if space.reshape_weight > 0 and _reshape_targets(shape[0]):
                options.append(kind)
        else:
            options.append(kind)
    if not options:
        return None

    weights = np.array([space.reshape_weight if k is LayerKind.RESHAPE else 1.0 for k in options])
    kind = options[int(rng.choice(len(options), p=weights / weights.sum()))]

    if kind is LayerKind.CONV2D:
        kernel = _pick(rng, [k for k in space.kernels if k <= min(shape[:2])])
        return LayerSpec.conv2d(_pick(rng, space.filters), kernel)
    elif kind is LayerKind.DENSE:
        return LayerSpec.dense(_pick(rng, space.units))
    elif kind is LayerKind.DROPOUT:
        return LayerSpec.dropout(_pick(rng, space.rates))
    elif kind is LayerKind.RESHAPE:
        return LayerSpec.reshape(_pick(rng, _reshape_targets(shape[0])))
    return LayerSpec(kind)


def sample_training(rng, space):
    optimizer = OptimizerKind(_pick(rng, space.optimizers))
    return TrainingConfig(
        optimizer=optimizer,
        learning_rate=default_learning_rate[optimizer],
        batch_size=int(_pick(rng, space.batch_sizes)),
        epochs=int(_pick(rng, space.epochs)),
    )


def _terminal_cost(state):
    # SPATIAL closes with Flatten + Dense, FLAT with Dense
    return 2 if state is FsmState.SPATIAL else 1


def _close(layers, state, num_classes):
    if state is FsmState.SPATIAL:
        layers.append(LayerSpec.flatten())
    layers.append(LayerSpec.dense(num_classes))
    return tuple(layers)


def _sample_layers(rng, input_shape, num_classes, space, depth):
    layers = []
    state = FsmState.SPATIAL
    shape = tuple(input_shape)
    while len(layers) + _terminal_cost(state) < depth:
        # only kinds that still leave room for the closing layers
        kinds = {k for k, s in fsm_transitions[state].items() if len(layers) + 1 + _terminal_cost(s) <= depth}
        layer = sample_layer(rng, state, shape, space, kinds)
        if layer is None:
            break
        layers.append(layer)
        state = _next_state(state, layer.kind)
        shape = layer_output_shape(layer, shape)
    return _close(layers, state, num_classes)


def sample_genome(rng, input_shape, num_classes, space=None):
    space = space or SearchSpace()
    depth = int(rng.integers(space.min_depth, space.max_depth + 1))
    for attempt in range(MAX_SAMPLE_TRIES):
        genome = Genome(sample_training(rng, space), _sample_layers(rng, input_shape, num_classes, space, depth))
        if not validate_genome(genome, input_shape, num_classes, space):
            return genome
        if attempt % 4 == 3 and depth > space.min_depth:
            depth -= 1
    raise ShapeError(f"no valid genome found for input {list(input_shape)}")


# repair and variation

def _filter_legal(layers, input_shape):
    """Drop every layer illegal for the state and shape reached so far."""
    kept = []
    state = FsmState.SPATIAL
    shape = tuple(input_shape)
    for layer in layers:
        following = _next_state(state, layer.kind)
        if following is None:
            continue
        try:
            out = layer_output_shape(layer, shape)
        except ShapeError:
            continue
        kept.append(layer)
        state, shape = following, out
    return kept, state, shape


def body_length(layers):
    """Layers before the closing Dense and, when present, its Flatten."""
    n = len(layers)
    if n and layers[-1].kind is LayerKind.DENSE:
        n -= 1
        if n and layers[n-1].kind is LayerKind.FLATTEN:
            n -= 1
    return n


def repair(layers, input_shape, num_classes, rng, space=None):
    """Nearest valid layer list: illegal layers removed, closing layers
    enforced, depth clamped to the search range."""
    space = space or SearchSpace()
    body = list(layers[:body_length(layers)])

    while True:
        body, state, shape = _filter_legal(body, input_shape)
        if len(body) + _terminal_cost(state) <= space.max_depth:
            break
        body.pop()

    while len(body) + _terminal_cost(state) < space.min_depth:
        body.append(LayerSpec.dropout(_pick(rng, space.rates)))

    return _close(body, state, num_classes)


def _states_along(layers, input_shape):
    """FSM state and shape before each position 0..len(layers)."""
    states = [(FsmState.SPATIAL, tuple(input_shape))]
    state, shape = states[0]
    for layer in layers:
        state = _next_state(state, layer.kind)
        shape = layer_output_shape(layer, shape)
        states.append((state, shape))
    return states


def _insert_layer(genome, rng, input_shape, space):
    body = genome.layers[:body_length(genome.layers)]
    states = _states_along(body, input_shape)
    positions = list(range(len(body) + 1))
    rng.shuffle(positions)
    for pos in positions:
        state, shape = states[pos]
        layer = sample_layer(rng, state, shape, space)
        if layer is not None:
            return body[:pos] + (layer,) + genome.layers[len(body):]
    return None


def _remove_layer(genome, rng):
    body = genome.layers[:body_length(genome.layers)]
    if not body:
        return None
    pos = int(rng.integers(len(body)))
    return body[:pos] + genome.layers[pos+1:]


def _resample_layer(genome, rng, space):
    body = genome.layers[:body_length(genome.layers)]
    tunable = [i for i, layer in enumerate(body)
               if layer.kind in (LayerKind.CONV2D, LayerKind.DENSE, LayerKind.DROPOUT)]
    if not tunable:
        return None
    pos = tunable[int(rng.integers(len(tunable)))]
    layer = body[pos]
    if layer.kind is LayerKind.CONV2D:
        if rng.random() < 0.5:
            layer = dataclasses.replace(layer, filters=int(_pick(rng, space.filters)))
        else:
            k = int(_pick(rng, space.kernels))
            layer = dataclasses.replace(layer, kernel=(k, k))
    elif layer.kind is LayerKind.DENSE:
        layer = LayerSpec.dense(_pick(rng, space.units))
    else:
        layer = LayerSpec.dropout(_pick(rng, space.rates))
    layers = list(genome.layers)
    layers[pos] = layer
    return tuple(layers)


def _resample_training(training, rng, space):
    choice = int(rng.integers(3))
    if choice == 0:
        optimizer = OptimizerKind(_pick(rng, space.optimizers))
        return dataclasses.replace(training, optimizer=optimizer, learning_rate=default_learning_rate[optimizer])
    elif choice == 1:
        return dataclasses.replace(training, epochs=int(_pick(rng, space.epochs)))
    return dataclasses.replace(training, batch_size=int(_pick(rng, space.batch_sizes)))


def mutate(genome, config, rng, input_shape, num_classes):
    space = config.space
    training = genome.training
    layers = None

    if rng.random() < config.newpb and len(genome) < space.max_depth:
        layers = _insert_layer(genome, rng, input_shape, space)

    if layers is None:
        op = int(rng.integers(3))
        if op == 0 and len(genome) > space.min_depth:
            layers = _remove_layer(genome, rng)
        elif op == 1:
            layers = _resample_layer(genome, rng, space)
        if layers is None:
            training = _resample_training(training, rng, space)
            layers = genome.layers

    return Genome(training, repair(layers, input_shape, num_classes, rng, space))


def crossover(a, b, rng, input_shape, num_classes, space=None):
    """Prefix of ``a`` spliced onto a suffix of ``b`` at cuts whose FSM
    states agree; training settings inherited field by field."""
    if a == b:
        return a
    space = space or SearchSpace()

    body_a = body_length(a.layers)
    body_b = body_length(b.layers)
    states_a = [s for s, _ in _states_along(a.layers[:body_a], input_shape)]
    states_b = [s for s, _ in _states_along(b.layers[:body_b], input_shape)]

    cuts = [(i, j) for i in range(body_a + 1) for j in range(body_b + 1) if states_a[i] is states_b[j]]
    i, j = cuts[int(rng.integers(len(cuts)))]
    layers = a.layers[:i] + b.layers[j:]

    ta, tb = a.training, b.training
    source = ta if rng.random() < 0.5 else tb
    training = TrainingConfig(
        optimizer=source.optimizer,
        learning_rate=source.learning_rate,
        epochs=(ta if rng.random() < 0.5 else tb).epochs,
        batch_size=(ta if rng.random() < 0.5 else tb).batch_size,
    )
    return Genome(training, repair(layers, input_shape, num_classes, rng, space))


# evaluation

def evaluate_genome(genome, dataset, config=None, seed=None):
    """Validation accuracy after training on an 80/20 split of ``dataset``.

    A failed training run scores 0.
    """
    config = config or EaConfig()
    seed = config.seed if seed is None else seed
    start = time.perf_counter()
    network = genome.network(dataset.input_shape)
    model_params = count_params(network)

    def result(fitness):
        return EvaluatedGenome(genome, float(fitness), model_params, int((time.perf_counter() - start) * 1000))

    if config.param_cap is not None and model_params > config.param_cap:
        log.warning("%r has %d parameters, above the cap of %d; fitness 0", genome, model_params, config.param_cap)
        return result(0.0)

    train, val = split_train_val(dataset, config.split_fraction, seed)
    epochs = genome.training.epochs
    if config.fast:
        epochs = min(epochs, FAST_EPOCH_CAP)
    training = dataclasses.replace(genome.training, epochs=epochs, seed=seed,
        batch_size=min(genome.training.batch_size, len(train)))

    try:
        params, _ = train_gradient(network, train, None, training)
    except TrainingError as exc:
        log.warning("Training %r failed (%s); fitness 0", genome, exc)
        return result(0.0)

    return result(accuracy(network, params, val))


def rank_key(evaluated):
    return (-evaluated.fitness, evaluated.genome.key)


class EvolutionRunner:

    def __init__(self, dataset, config=None, test=None, threads=None):
        self.log = logging.getLogger(f"evotrain.{type(self).__name__}")
        self.dataset = dataset
        self.config = config or EaConfig()
        self.test = test
        self.threads = threads

        self.log.info("Topology evolution")
        self.log.info("evotrain version %s", __version__)
        self.log.info("lambda=%d mu=%d ngen=%d on %r", self.config.lambda_, self.config.mu,
            self.config.ngen, dataset)

        self.input_shape = dataset.input_shape
        self.num_classes = dataset.num_classes
        self.cache = {}
        self.evaluations = 0
        self.trainings = 0

    def _evaluate(self, genomes):
        cfg = self.config
        for genome in genomes:
            assert not validate_genome(genome, self.input_shape, self.num_classes, cfg.space), genome
        fresh = list({g.key: g for g in genomes if g.key not in self.cache}.values())
        for genome, evaluated in zip(fresh, ordered_map(lambda g: evaluate_genome(g, self.dataset, cfg),
                fresh, self.threads)):
            self.cache[genome.key] = evaluated
        self.evaluations += len(genomes)
        self.trainings += len(fresh)
        return [self.cache[g.key] for g in genomes]

    def _stats(self, generation, population):
        fitness = [e.fitness for e in population]
        return GenerationStats(generation, float(max(fitness)), float(np.mean(fitness)), self.evaluations)

    def _offspring(self, parents, rng):
        cfg = self.config
        children = []
        while len(children) < cfg.lambda_:
            if len(parents) > 1:
                i, j = rng.choice(len(parents), size=2, replace=False)
            else:
                i = j = 0
            a, b = parents[int(i)].genome, parents[int(j)].genome
            crossed = rng.random() < cfg.cxpb
            child = crossover(a, b, rng, self.input_shape, self.num_classes, cfg.space) if crossed else a
            if rng.random() < cfg.mutpb or not crossed:
                child = mutate(child, cfg, rng, self.input_shape, self.num_classes)
            children.append(child)
        return children

    def finalize(self, best):
        """Retrain the winner on the whole training set and score it."""
        cap = self.config.param_cap
        if cap is not None and best.model_params > cap:
            return best
        network = best.genome.network(self.input_shape)
        training = dataclasses.replace(best.genome.training, seed=self.config.seed,
            batch_size=min(best.genome.training.batch_size, len(self.dataset)))
        try:
            params, _ = train_gradient(network, self.dataset, None, training)
        except TrainingError as exc:
            self.log.warning("Final retrain of %r failed (%s)", best.genome, exc)
            return best
        train_loss, train_acc = evaluate(network, params, self.dataset)
        test_loss = test_acc = None
        if self.test is not None:
            test_loss, test_acc = evaluate(network, params, self.test)
        self.log.info("Best %r: %d parameters, train acc %.4f, test acc %s",
            best.genome, best.model_params, train_acc, test_acc)
        return dataclasses.replace(best, train_loss=train_loss, train_acc=train_acc, test_acc=test_acc,
            test_loss=test_loss)

    def run(self):
        cfg = self.config
        rng = np.random.default_rng(cfg.seed)
        population = self._evaluate([sample_genome(rng, self.input_shape, self.num_classes, cfg.space)
                                     for _ in range(cfg.mu)])
        population.sort(key=rank_key)
        trace = [self._stats(0, population)]
        best_fitness = population[0].fitness
        stagnant = 0

        for generation in range(1, cfg.ngen + 1):
            offspring = self._evaluate(self._offspring(population, rng))
            pool = sorted(population + offspring, key=rank_key)
            population = pool[:cfg.mu]
            trace.append(self._stats(generation, population))
            self.log.info("Generation %d: best %.4f, mean %.4f, %d evaluations", generation,
                trace[-1].best_fitness, trace[-1].mean_fitness, self.evaluations)

            if population[0].fitness > best_fitness:
                best_fitness = population[0].fitness
                stagnant = 0
            else:
                stagnant += 1
                if stagnant >= cfg.stagnation_limit:
                    self.log.info("No improvement for %d generations, stopping", stagnant)
                    break

        return self.finalize(population[0]), trace

    def random_search(self):
        cfg = self.config
        rng = np.random.default_rng((cfg.seed, 1))
        genomes = [sample_genome(rng, self.input_shape, self.num_classes, cfg.space)
                   for _ in range(cfg.evaluation_budget)]
        evaluated = sorted(self._evaluate(genomes), key=rank_key)
        self.log.info("Random search: best %.4f over %d evaluations", evaluated[0].fitness, self.evaluations)
        return self.finalize(evaluated[0])


def mu_plus_lambda_run(dataset, config=None, test=None, threads=None):
    return EvolutionRunner(dataset, config, test, threads).run()


def random_search_baseline(dataset, config=None, test=None, threads=None):
    return EvolutionRunner(dataset, config, test, threads).random_search()
