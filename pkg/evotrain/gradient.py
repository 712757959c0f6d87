"""

Copyright (c) 2026 evotrain developers

SPDX-License-Identifier: MIT

"""

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .version import __version__
from .constants import LayerKind, LossKind, Mode, OptimizerKind
from .errors import ConfigError, TrainingError
from .network import (ParameterVector, avgpool2x2_backward, conv2d_backward, dropout_mask, evaluate,
    example_losses, glorot_init, infer_shapes, maxpool2x2_backward, run_layers)
from .record import RunRecord


@dataclass(frozen=True)
class TrainingConfig:
    optimizer: OptimizerKind = OptimizerKind.ADAM
    learning_rate: float = 0.001
    batch_size: int = 32
    epochs: int = 1
    seed: int = 0

    def __post_init__(self):
        try:
            object.__setattr__(self, 'optimizer', OptimizerKind(self.optimizer))
        except ValueError:
            raise ConfigError(f"unknown optimizer {self.optimizer!r}") from None
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be positive, got {self.batch_size}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be at least 1, got {self.epochs}")


@dataclass
class OptimizerState:
    step: int = 0
    moments: dict = field(default_factory=dict)


class Optimizer:
    slots = ()

    def __init__(self, learning_rate):
        self.learning_rate = learning_rate

    def init_state(self, n):
        return OptimizerState(0, {name: np.zeros(n) for name in self.slots})

    def update(self, values, grad, state):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}(learning_rate={self.learning_rate!r})"


class Sgd(Optimizer):

    def update(self, values, grad, state):
        return values - self.learning_rate * grad, OptimizerState(state.step + 1, {})


class Adam(Optimizer):
    slots = ('m', 'v')

    def __init__(self, learning_rate, beta_1=0.9, beta_2=0.999, eps=1e-8):
        super().__init__(learning_rate)
        self.beta_1 = beta_1
        self.beta_2 = beta_2
        self.eps = eps

    def update(self, values, grad, state):
        t = state.step + 1
        m = self.beta_1 * state.moments['m'] + (1 - self.beta_1) * grad
        v = self.beta_2 * state.moments['v'] + (1 - self.beta_2) * grad * grad
        m_hat = m / (1 - self.beta_1**t)
        v_hat = v / (1 - self.beta_2**t)
        values = values - self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)
        return values, OptimizerState(t, {'m': m, 'v': v})


class Nadam(Adam):

    def update(self, values, grad, state):
        t = state.step + 1
        m = self.beta_1 * state.moments['m'] + (1 - self.beta_1) * grad
        v = self.beta_2 * state.moments['v'] + (1 - self.beta_2) * grad * grad
        # Nesterov look-ahead on the first moment
        m_hat = self.beta_1 * m / (1 - self.beta_1**(t + 1)) + (1 - self.beta_1) * grad / (1 - self.beta_1**t)
        v_hat = v / (1 - self.beta_2**t)
        values = values - self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)
        return values, OptimizerState(t, {'m': m, 'v': v})


class Adamax(Optimizer):
    slots = ('m', 'u')

    def __init__(self, learning_rate, beta_1=0.9, beta_2=0.999, eps=1e-7):
        super().__init__(learning_rate)
        self.beta_1 = beta_1
        self.beta_2 = beta_2
        self.eps = eps

    def update(self, values, grad, state):
        t = state.step + 1
        m = self.beta_1 * state.moments['m'] + (1 - self.beta_1) * grad
        u = np.maximum(self.beta_2 * state.moments['u'], np.abs(grad))
        values = values - self.learning_rate / (1 - self.beta_1**t) * m / (u + self.eps)
        return values, OptimizerState(t, {'m': m, 'u': u})


class RmsProp(Optimizer):
    slots = ('v',)

    def __init__(self, learning_rate, rho=0.9, eps=1e-7):
        super().__init__(learning_rate)
        self.rho = rho
        self.eps = eps

    def update(self, values, grad, state):
        v = self.rho * state.moments['v'] + (1 - self.rho) * grad * grad
        values = values - self.learning_rate * grad / (np.sqrt(v) + self.eps)
        return values, OptimizerState(state.step + 1, {'v': v})


class Adagrad(Optimizer):
    slots = ('acc',)

    def __init__(self, learning_rate, eps=1e-7):
        super().__init__(learning_rate)
        self.eps = eps

    def update(self, values, grad, state):
        acc = state.moments['acc'] + grad * grad
        values = values - self.learning_rate * grad / (np.sqrt(acc) + self.eps)
        return values, OptimizerState(state.step + 1, {'acc': acc})


optimizer_classes = {
    OptimizerKind.SGD:     Sgd,
    OptimizerKind.ADAM:    Adam,
    OptimizerKind.RMSPROP: RmsProp,
    OptimizerKind.ADAGRAD: Adagrad,
    OptimizerKind.ADAMAX:  Adamax,
    OptimizerKind.NADAM:   Nadam,
}


def make_optimizer(config):
    return optimizer_classes[config.optimizer](config.learning_rate)


def optimizer_step(state, params, grad, config, optimizer=None):
    """Apply one update of the configured rule; returns (params, state)."""
    if optimizer is None:
        optimizer = make_optimizer(config)
    if state is None:
        state = optimizer.init_state(len(params))
    values, state = optimizer.update(params.values, grad.values, state)
    return params.with_values(values), state


def draw_dropout_masks(network, batch_size, rng):
    """Train-mode dropout masks for a batch, keyed by layer index."""
    masks = {}
    shapes = [network.input_shape] + infer_shapes(network)
    for index, layer in enumerate(network.layers):
        if layer.kind is LayerKind.DROPOUT:
            masks[index] = dropout_mask((batch_size,) + tuple(shapes[index]), layer.rate, rng)
    return masks


def backward(network, params, batch, labels, rng=None, masks=None):
    """Mean batch loss and its gradient, with dropout masks held fixed."""
    network.check()
    labels = np.asarray(labels, dtype=np.int64)
    cache = []
    probs = run_layers(network, params, batch, Mode.TRAIN, rng, masks, cache)
    loss = float(example_losses(probs, labels, network.loss_kind).mean())

    n = len(labels)
    if network.loss_kind is LossKind.BINARY_CE:
        dout = (probs - labels[:, None]) / n
    else:
        dout = probs.copy()
        dout[np.arange(n), labels] -= 1.0
        dout /= n

    arrays = params.arrays()
    last = len(network.layers) - 1
    first = min(params.layout.layer_ids)
    grads = {}

    for index in range(last, first - 1, -1):
        layer = network.layers[index]
        entry = cache[index]
        x = entry['input']

        if layer.kind is LayerKind.DENSE:
            kernel, _ = arrays[index]
            if index != last:
                dout = dout * (entry['z'] > 0)
            grads[index] = (x.T @ dout, dout.sum(axis=0))
            dout = dout @ kernel.T
        elif layer.kind is LayerKind.CONV2D:
            kernel, _ = arrays[index]
            dout = dout * (entry['z'] > 0)
            dx, dkernel, dbias = conv2d_backward(x, kernel, dout, input_grad=index > first)
            grads[index] = (dkernel, dbias)
            dout = dx
        elif layer.kind is LayerKind.MAXPOOL:
            dout = maxpool2x2_backward(x, dout)
        elif layer.kind is LayerKind.AVGPOOL:
            dout = avgpool2x2_backward(x, dout)
        elif layer.kind is LayerKind.DROPOUT:
            if 'mask' in entry:
                dout = dout * entry['mask']
        else:
            dout = dout.reshape(x.shape)

    return loss, ParameterVector.from_arrays(grads, params.layout)


class GradientTrainer:

    def __init__(self, network, config, solver_name=None, run_id=0):
        self.log = logging.getLogger(f"evotrain.{type(self).__name__}")
        self.network = network
        self.config = config
        self.solver_name = solver_name or config.optimizer.value
        self.run_id = run_id

        self.log.info("Gradient trainer")
        self.log.info("evotrain version %s", __version__)

        network.check()
        self.optimizer = make_optimizer(config)
        self.steps = 0

    def train(self, train, test, init=None):
        config = self.config
        if config.batch_size > len(train):
            raise ConfigError(f"batch_size {config.batch_size} exceeds training set of {len(train)}")

        rng = np.random.default_rng(config.seed)
        params = glorot_init(self.network, config.seed) if init is None else init
        state = self.optimizer.init_state(len(params))
        records = []
        start = time.perf_counter()

        self.log.info("Training %r with %r, %d epochs of %d batches", self.network, self.optimizer,
            config.epochs, math.ceil(len(train) / config.batch_size))

        for epoch in range(1, config.epochs + 1):
            order = rng.permutation(len(train))
            for k in range(0, len(order), config.batch_size):
                idx = order[k:k+config.batch_size]
                loss, grad = backward(self.network, params, train.inputs[idx], train.labels[idx], rng)
                if not math.isfinite(loss):
                    raise TrainingError(f"non-finite loss at epoch {epoch}, step {state.step}")
                values, state = self.optimizer.update(params.values, grad.values, state)
                if not np.all(np.isfinite(values)):
                    raise TrainingError(f"non-finite parameters at epoch {epoch}, step {state.step}")
                params = params.with_values(values)

            self.steps = state.step
            train_loss, train_acc = evaluate(self.network, params, train)
            if test is not None:
                test_loss, test_acc = evaluate(self.network, params, test)
            else:
                test_loss, test_acc = math.nan, math.nan
            records.append(RunRecord(
                run_id=self.run_id,
                seed=config.seed,
                solver=self.solver_name,
                schedule="",
                epoch=epoch,
                train_loss=train_loss,
                train_acc=train_acc,
                test_loss=test_loss,
                test_acc=test_acc,
                evals_cumulative=state.step,
                wall_ms=int((time.perf_counter() - start) * 1000),
            ))
            self.log.info("Epoch %d: train loss %.4f acc %.4f, test loss %.4f acc %.4f",
                epoch, train_loss, train_acc, test_loss, test_acc)

        return params, records


def train_gradient(network, dataset_train, dataset_test, config, run_id=0, init=None):
    trainer = GradientTrainer(network, config, run_id=run_id)
    return trainer.train(dataset_train, dataset_test, init)
