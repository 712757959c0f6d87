"""

Copyright (c) 2026 evotrain developers

SPDX-License-Identifier: MIT

"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit, softmax

from .constants import LayerKind, LossKind, Mode, PARAMETERIZED_KINDS, PROB_EPS
from .errors import ShapeError

log = logging.getLogger(__name__)

EVAL_CHUNK = 1024


@dataclass(frozen=True)
class LayerSpec:
    """One layer of a network: its kind plus structural hyper-parameters.

    Only the fields relevant to ``kind`` are meaningful; the others keep their
    defaults so that equal layers compare and hash equal.
    """
    kind: LayerKind
    filters: int = 0
    kernel: tuple = ()
    units: int = 0
    rate: float = 0.0
    target_shape: tuple = ()

    def __post_init__(self):
        kind = LayerKind(self.kind)
        object.__setattr__(self, 'kind', kind)
        object.__setattr__(self, 'kernel', tuple(int(k) for k in self.kernel))
        object.__setattr__(self, 'target_shape', tuple(int(d) for d in self.target_shape))

        if kind is LayerKind.CONV2D:
            if self.filters < 1:
                raise ShapeError(f"conv2d needs at least one filter, got {self.filters}")
            if len(self.kernel) != 2 or min(self.kernel) < 1:
                raise ShapeError(f"conv2d kernel must be two positive extents, got {self.kernel}")
        elif kind is LayerKind.DENSE:
            if self.units < 1:
                raise ShapeError(f"dense needs at least one unit, got {self.units}")
        elif kind is LayerKind.DROPOUT:
            if not 0.0 <= self.rate < 1.0:
                raise ShapeError(f"dropout rate must be in [0, 1), got {self.rate}")
        elif kind is LayerKind.RESHAPE:
            if len(self.target_shape) != 3 or min(self.target_shape) < 1:
                raise ShapeError(f"reshape target must be a positive [H, W, C], got {self.target_shape}")

    @classmethod
    def conv2d(cls, filters, kh, kw=None):
        return cls(LayerKind.CONV2D, filters=int(filters), kernel=(kh, kh if kw is None else kw))

    @classmethod
    def maxpool(cls):
        return cls(LayerKind.MAXPOOL)

    @classmethod
    def avgpool(cls):
        return cls(LayerKind.AVGPOOL)

    @classmethod
    def dense(cls, units):
        return cls(LayerKind.DENSE, units=int(units))

    @classmethod
    def dropout(cls, rate):
        return cls(LayerKind.DROPOUT, rate=float(rate))

    @classmethod
    def flatten(cls):
        return cls(LayerKind.FLATTEN)

    @classmethod
    def reshape(cls, target_shape):
        return cls(LayerKind.RESHAPE, target_shape=tuple(target_shape))

    @property
    def has_params(self):
        return self.kind in PARAMETERIZED_KINDS

    def __repr__(self):
        kind = self.kind
        if kind is LayerKind.CONV2D:
            return f"Conv2D({self.filters}, {self.kernel[0]}x{self.kernel[1]})"
        elif kind is LayerKind.DENSE:
            return f"Dense({self.units})"
        elif kind is LayerKind.DROPOUT:
            return f"Dropout({self.rate:g})"
        elif kind is LayerKind.RESHAPE:
            return f"Reshape({list(self.target_shape)})"
        return {
            LayerKind.MAXPOOL: "MaxPool2x2",
            LayerKind.AVGPOOL: "AvgPool2x2",
            LayerKind.FLATTEN: "Flatten",
        }[kind]


@dataclass(frozen=True)
class NetworkSpec:
    input_shape: tuple
    layers: tuple
    loss_kind: LossKind = LossKind.CATEGORICAL_CE

    def __post_init__(self):
        object.__setattr__(self, 'input_shape', tuple(int(d) for d in self.input_shape))
        object.__setattr__(self, 'layers', tuple(self.layers))
        object.__setattr__(self, 'loss_kind', LossKind(self.loss_kind))

    def __len__(self):
        return len(self.layers)

    def check(self):
        """Verify shapes end to end and that the head matches the loss."""
        shapes = infer_shapes(self)
        if not self.layers or self.layers[-1].kind is not LayerKind.DENSE:
            raise ShapeError("final layer must be dense")
        units = self.layers[-1].units
        if self.loss_kind is LossKind.BINARY_CE and units != 1:
            raise ShapeError(f"binary cross-entropy needs a single output unit, got {units}")
        if self.loss_kind is LossKind.CATEGORICAL_CE and units < 2:
            raise ShapeError(f"categorical cross-entropy needs at least two output units, got {units}")
        return shapes

    @property
    def num_classes(self):
        units = self.layers[-1].units
        return 2 if self.loss_kind is LossKind.BINARY_CE else units

    def __repr__(self):
        body = "-".join(repr(layer) for layer in self.layers)
        return f"{type(self).__name__}({list(self.input_shape)}: {body}, loss={self.loss_kind.value})"


def _check_input_shape(shape):
    if len(shape) != 3 or min(shape) < 1:
        raise ShapeError(f"input shape must be a positive [H, W, C], got {list(shape)}")


def layer_output_shape(layer, shape):
    kind = layer.kind
    rank = len(shape)

    if kind in (LayerKind.CONV2D, LayerKind.MAXPOOL, LayerKind.AVGPOOL, LayerKind.FLATTEN) and rank != 3:
        raise ShapeError(f"{layer!r} needs a rank-3 input, got {list(shape)}")
    if kind in (LayerKind.DENSE, LayerKind.RESHAPE) and rank != 1:
        raise ShapeError(f"{layer!r} needs a rank-1 input, got {list(shape)}")

    if kind is LayerKind.CONV2D:
        h, w, _ = shape
        out = (h - layer.kernel[0] + 1, w - layer.kernel[1] + 1, layer.filters)
    elif kind in (LayerKind.MAXPOOL, LayerKind.AVGPOOL):
        h, w, c = shape
        out = (h // 2, w // 2, c)
    elif kind is LayerKind.FLATTEN:
        out = (math.prod(shape),)
    elif kind is LayerKind.DENSE:
        out = (layer.units,)
    elif kind is LayerKind.DROPOUT:
        out = tuple(shape)
    elif kind is LayerKind.RESHAPE:
        if math.prod(layer.target_shape) != shape[0]:
            raise ShapeError(f"{layer!r} does not preserve {shape[0]} elements")
        out = layer.target_shape
    else:
        raise ShapeError(f"unknown layer kind {kind}")

    if min(out) < 1:
        raise ShapeError(f"{layer!r} on {list(shape)} gives empty output {list(out)}")
    return out


def infer_shapes(network):
    """Output shape after each layer.

    Conv2D uses valid padding and stride 1, pools use a 2x2 window with
    stride 2 and floor division.
    """
    _check_input_shape(network.input_shape)
    shapes = []
    shape = network.input_shape
    for layer in network.layers:
        shape = layer_output_shape(layer, shape)
        shapes.append(shape)
    return shapes


def _layer_param_shapes(layer, in_shape):
    if layer.kind is LayerKind.CONV2D:
        kh, kw = layer.kernel
        return (kh, kw, in_shape[2], layer.filters), (layer.filters,)
    elif layer.kind is LayerKind.DENSE:
        return (in_shape[0], layer.units), (layer.units,)
    return None


def count_params(network):
    total = 0
    shape = network.input_shape
    for layer, out_shape in zip(network.layers, infer_shapes(network)):
        shapes = _layer_param_shapes(layer, shape)
        if shapes is not None:
            total += math.prod(shapes[0]) + math.prod(shapes[1])
        shape = out_shape
    return total


@dataclass(frozen=True)
class Segment:
    layer_index: int
    offset: int
    length: int
    kernel_shape: tuple
    bias_shape: tuple

    @property
    def stop(self):
        return self.offset + self.length

    @property
    def kernel_size(self):
        return math.prod(self.kernel_shape)

    @property
    def fan_in(self):
        return math.prod(self.kernel_shape[:-1])

    @property
    def fan_out(self):
        return math.prod(self.kernel_shape[:-2]) * self.kernel_shape[-1]

    @property
    def glorot_limit(self):
        return math.sqrt(6.0 / (self.fan_in + self.fan_out))

    @property
    def slice(self):
        return slice(self.offset, self.stop)


@dataclass(frozen=True)
class LayerLayout:
    """Flat view of every trainable array: one segment per parameterized layer,
    each holding the kernel followed by the bias."""
    segments: tuple
    total: int

    @classmethod
    def from_network(cls, network):
        segments = []
        offset = 0
        shape = network.input_shape
        for index, (layer, out_shape) in enumerate(zip(network.layers, infer_shapes(network))):
            shapes = _layer_param_shapes(layer, shape)
            if shapes is not None:
                kernel_shape, bias_shape = shapes
                length = math.prod(kernel_shape) + math.prod(bias_shape)
                segments.append(Segment(index, offset, length, kernel_shape, bias_shape))
                offset += length
            shape = out_shape
        return cls(tuple(segments), offset)

    @property
    def layer_ids(self):
        return [seg.layer_index for seg in self.segments]

    def segment(self, layer_index):
        for seg in self.segments:
            if seg.layer_index == layer_index:
                return seg
        raise KeyError(f"layer {layer_index} has no trainable parameters")

    def scatter(self, values):
        """Per-layer (kernel, bias) views into a flat vector."""
        arrays = {}
        for seg in self.segments:
            kernel = values[seg.offset:seg.offset+seg.kernel_size].reshape(seg.kernel_shape)
            bias = values[seg.offset+seg.kernel_size:seg.stop].reshape(seg.bias_shape)
            arrays[seg.layer_index] = (kernel, bias)
        return arrays

    def gather(self, arrays):
        values = np.empty(self.total, dtype=np.float64)
        for seg in self.segments:
            kernel, bias = arrays[seg.layer_index]
            values[seg.offset:seg.offset+seg.kernel_size] = np.asarray(kernel, dtype=np.float64).ravel()
            values[seg.offset+seg.kernel_size:seg.stop] = np.asarray(bias, dtype=np.float64).ravel()
        return values

    def glorot_limits(self):
        """Per-coordinate Glorot bound of the owning layer."""
        limits = np.empty(self.total, dtype=np.float64)
        for seg in self.segments:
            limits[seg.slice] = seg.glorot_limit
        return limits


class ParameterVector:
    """Immutable flat vector of every trainable parameter of a network."""

    def __init__(self, values, layout):
        values = np.array(values, dtype=np.float64)
        if values.ndim != 1 or len(values) != layout.total:
            raise ShapeError(f"parameter vector of length {values.size} does not match layout of {layout.total}")
        if not np.all(np.isfinite(values)):
            raise ValueError("parameter vector has non-finite entries")
        values.setflags(write=False)
        self.values = values
        self.layout = layout

    @classmethod
    def zeros(cls, network):
        layout = LayerLayout.from_network(network)
        return cls(np.zeros(layout.total), layout)

    @classmethod
    def from_arrays(cls, arrays, layout):
        return cls(layout.gather(arrays), layout)

    def arrays(self):
        return self.layout.scatter(self.values)

    def with_values(self, values):
        return type(self)(values, self.layout)

    def with_segment(self, seg, segment_values):
        values = self.values.copy()
        values[seg] = segment_values
        return type(self)(values, self.layout)

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        if isinstance(other, ParameterVector):
            return self.layout == other.layout and np.array_equal(self.values, other.values)
        return NotImplemented

    def __repr__(self):
        return f"{type(self).__name__}(total={self.layout.total}, segments={len(self.layout.segments)})"


class Dataset:
    """Images [M, H, W, C] as float64 with integer class labels."""

    def __init__(self, inputs, labels, num_classes=None):
        inputs = np.asarray(inputs, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.int64)
        if inputs.ndim != 4:
            raise ShapeError(f"dataset inputs must be [M, H, W, C], got {list(inputs.shape)}")
        if len(inputs) < 1 or len(labels) != len(inputs):
            raise ShapeError(f"{len(inputs)} inputs vs {len(labels)} labels")
        if num_classes is None:
            num_classes = int(labels.max()) + 1
        if labels.min() < 0 or labels.max() >= num_classes:
            raise ValueError(f"labels outside [0, {num_classes})")
        self.inputs = inputs
        self.labels = labels
        self.num_classes = int(num_classes)

    def __len__(self):
        return len(self.labels)

    @property
    def input_shape(self):
        return tuple(self.inputs.shape[1:])

    def take(self, indices):
        indices = np.asarray(indices, dtype=np.int64)
        return type(self)(self.inputs[indices], self.labels[indices], self.num_classes)

    def __repr__(self):
        return f"{type(self).__name__}(M={len(self)}, shape={list(self.input_shape)}, classes={self.num_classes})"


def glorot_init(network, seed):
    """Glorot-uniform kernels, zero biases; deterministic per seed."""
    layout = LayerLayout.from_network(network)
    rng = np.random.default_rng(seed)
    values = np.zeros(layout.total, dtype=np.float64)
    for seg in layout.segments:
        limit = seg.glorot_limit
        values[seg.offset:seg.offset+seg.kernel_size] = rng.uniform(-limit, limit, seg.kernel_size)
    return ParameterVector(values, layout)


# layer primitives, NHWC

def conv2d(x, kernel, bias):
    kh, kw = kernel.shape[:2]
    windows = sliding_window_view(x, (kh, kw), axis=(1, 2))
    return np.tensordot(windows, kernel.transpose(2, 0, 1, 3), axes=([3, 4, 5], [0, 1, 2])) + bias


def conv2d_backward(x, kernel, dout, input_grad=True):
    kh, kw = kernel.shape[:2]
    windows = sliding_window_view(x, (kh, kw), axis=(1, 2))
    dkernel = np.tensordot(windows, dout, axes=([0, 1, 2], [0, 1, 2])).transpose(1, 2, 0, 3)
    dbias = dout.sum(axis=(0, 1, 2))
    if not input_grad:
        return None, dkernel, dbias
    # full correlation with the flipped kernel
    padded = np.pad(dout, ((0, 0), (kh-1, kh-1), (kw-1, kw-1), (0, 0)))
    pwindows = sliding_window_view(padded, (kh, kw), axis=(1, 2))
    flipped = kernel[::-1, ::-1].transpose(3, 0, 1, 2)
    dx = np.tensordot(pwindows, flipped, axes=([3, 4, 5], [0, 1, 2]))
    return dx, dkernel, dbias


def _pool_blocks(x):
    b, h, w, c = x.shape
    h2, w2 = h // 2, w // 2
    return x[:, :2*h2, :2*w2, :].reshape(b, h2, 2, w2, 2, c)


def maxpool2x2(x):
    return _pool_blocks(x).max(axis=(2, 4))


def maxpool2x2_backward(x, dout):
    b, h2, _, w2, _, c = _pool_blocks(x).shape
    blocks = _pool_blocks(x).transpose(0, 1, 3, 5, 2, 4).reshape(b, h2, w2, c, 4)
    # first maximum of each window takes the gradient
    winner = blocks.argmax(axis=-1)
    g = (np.arange(4) == winner[..., None]) * dout[..., None]
    g = g.reshape(b, h2, w2, c, 2, 2).transpose(0, 1, 4, 2, 5, 3).reshape(b, 2*h2, 2*w2, c)
    dx = np.zeros_like(x)
    dx[:, :2*h2, :2*w2, :] = g
    return dx


def avgpool2x2(x):
    return _pool_blocks(x).mean(axis=(2, 4))


def avgpool2x2_backward(x, dout):
    h2, w2 = dout.shape[1:3]
    dx = np.zeros_like(x)
    dx[:, :2*h2, :2*w2, :] = np.repeat(np.repeat(dout, 2, axis=1), 2, axis=2) / 4.0
    return dx


def dropout_mask(shape, rate, rng):
    if rate == 0.0:
        return np.ones(shape)
    return (rng.random(shape) >= rate) / (1.0 - rate)


def output_probabilities(z, loss_kind):
    if loss_kind is LossKind.BINARY_CE:
        return expit(z)
    return softmax(z, axis=1)


def run_layers(network, params, batch, mode=Mode.EVAL, rng=None, masks=None, cache=None):
    """Apply every layer in order and return output probabilities.

    ``masks`` maps dropout layer index to a fixed mask; missing masks are drawn
    from ``rng`` in train mode.  When ``cache`` is a list, per-layer inputs and
    auxiliaries needed by backpropagation are appended to it.
    """
    mode = Mode(mode)
    x = np.asarray(batch, dtype=np.float64)
    if x.ndim != 4 or tuple(x.shape[1:]) != network.input_shape:
        raise ShapeError(f"batch of shape {list(x.shape)} does not match input {list(network.input_shape)}")

    arrays = params.arrays()
    last = len(network.layers) - 1

    for index, layer in enumerate(network.layers):
        kind = layer.kind
        entry = {'input': x}

        if kind is LayerKind.CONV2D:
            kernel, bias = arrays[index]
            z = conv2d(x, kernel, bias)
            entry['z'] = z
            x = np.maximum(z, 0.0)
        elif kind is LayerKind.DENSE:
            kernel, bias = arrays[index]
            z = x @ kernel + bias
            entry['z'] = z
            if index == last:
                x = output_probabilities(z, network.loss_kind)
            else:
                x = np.maximum(z, 0.0)
        elif kind is LayerKind.MAXPOOL:
            x = maxpool2x2(x)
        elif kind is LayerKind.AVGPOOL:
            x = avgpool2x2(x)
        elif kind is LayerKind.DROPOUT:
            if mode is Mode.TRAIN:
                mask = None if masks is None else masks.get(index)
                if mask is None:
                    if rng is None:
                        raise ValueError("train-mode forward needs an rng for dropout")
                    mask = dropout_mask(x.shape, layer.rate, rng)
                entry['mask'] = mask
                x = x * mask
        elif kind is LayerKind.FLATTEN:
            x = x.reshape(len(x), -1)
        elif kind is LayerKind.RESHAPE:
            x = x.reshape((len(x),) + layer.target_shape)

        if cache is not None:
            cache.append(entry)

    return x


def forward(network, params, batch, mode=Mode.EVAL, rng=None):
    network.check()
    return run_layers(network, params, batch, mode, rng)


def predict(network, params, inputs, chunk_size=EVAL_CHUNK):
    """Eval-mode probabilities over a large input array, in fixed-size chunks."""
    network.check()
    outputs = [run_layers(network, params, inputs[k:k+chunk_size])
               for k in range(0, len(inputs), chunk_size)]
    return np.concatenate(outputs, axis=0)


def example_losses(probs, labels, loss_kind):
    labels = np.asarray(labels)
    if loss_kind is LossKind.BINARY_CE:
        p = np.clip(probs[:, 0], PROB_EPS, 1.0 - PROB_EPS)
        y = labels.astype(np.float64)
        return -(y * np.log(p) + (1.0 - y) * np.log1p(-p))
    p = np.clip(probs[np.arange(len(labels)), labels], PROB_EPS, 1.0 - PROB_EPS)
    return -np.log(p)


def predicted_classes(probs, loss_kind):
    if loss_kind is LossKind.BINARY_CE:
        return (probs[:, 0] >= 0.5).astype(np.int64)
    # argmax returns the lowest index on ties
    return probs.argmax(axis=1)


def aggregate_loss(network, params, dataset, mode=Mode.EVAL, rng=None):
    """Mean cross-entropy over every example of the dataset."""
    if Mode(mode) is Mode.TRAIN:
        probs = forward(network, params, dataset.inputs, Mode.TRAIN, rng)
    else:
        probs = predict(network, params, dataset.inputs)
    return float(example_losses(probs, dataset.labels, network.loss_kind).mean())


def accuracy(network, params, dataset):
    probs = predict(network, params, dataset.inputs)
    return float(np.mean(predicted_classes(probs, network.loss_kind) == dataset.labels))


def evaluate(network, params, dataset):
    """Loss and accuracy from a single pass."""
    probs = predict(network, params, dataset.inputs)
    loss = float(example_losses(probs, dataset.labels, network.loss_kind).mean())
    acc = float(np.mean(predicted_classes(probs, network.loss_kind) == dataset.labels))
    return loss, acc
