"""

Copyright (c) 2026 evotrain developers

SPDX-License-Identifier: MIT

NetworkSpec documents (YAML, one layer per list entry):

    input_shape: [28, 28, 1]
    loss: categorical          # categorical | binary
    layers:
      - {kind: conv2d, filters: 28, kernel: [3, 3]}
      - {kind: maxpool}
      - {kind: avgpool}
      - {kind: dropout, rate: 0.2}
      - {kind: flatten}
      - {kind: reshape, target_shape: [7, 4, 1]}
      - {kind: dense, units: 10}

"""

from pathlib import Path

import yaml

from .constants import LayerKind, LossKind
from .errors import ConfigError, EvotrainError, ShapeError
from .network import LayerSpec, NetworkSpec

# keys allowed per layer kind, besides 'kind'
layer_fields = {
    LayerKind.CONV2D:  ('filters', 'kernel'),
    LayerKind.MAXPOOL: (),
    LayerKind.AVGPOOL: (),
    LayerKind.DENSE:   ('units',),
    LayerKind.DROPOUT: ('rate',),
    LayerKind.FLATTEN: (),
    LayerKind.RESHAPE: ('target_shape',),
}


def layer_to_entry(layer):
    entry = {'kind': layer.kind.value}
    if layer.kind is LayerKind.CONV2D:
        entry['filters'] = layer.filters
        entry['kernel'] = list(layer.kernel)
    elif layer.kind is LayerKind.DENSE:
        entry['units'] = layer.units
    elif layer.kind is LayerKind.DROPOUT:
        entry['rate'] = layer.rate
    elif layer.kind is LayerKind.RESHAPE:
        entry['target_shape'] = list(layer.target_shape)
    return entry


def layer_from_entry(entry):
    if not isinstance(entry, dict) or 'kind' not in entry:
        raise ConfigError(f"layer entry must be a mapping with a kind: {entry!r}")
    try:
        kind = LayerKind(str(entry['kind']).lower())
    except ValueError:
        raise ConfigError(f"unknown layer kind {entry['kind']!r}") from None

    extra = set(entry) - {'kind'} - set(layer_fields[kind])
    if extra:
        raise ConfigError(f"unexpected keys for {kind.value}: {sorted(extra)}")

    try:
        return _build_layer(kind, entry)
    except EvotrainError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad {kind.value} layer {entry!r}: {exc}") from None


def _build_layer(kind, entry):
    if kind is LayerKind.CONV2D:
        kernel = entry.get('kernel', 3)
        if isinstance(kernel, int):
            kernel = [kernel, kernel]
        return LayerSpec(kind, filters=int(entry.get('filters', 0)), kernel=tuple(int(k) for k in kernel))
    elif kind is LayerKind.DENSE:
        return LayerSpec(kind, units=int(entry.get('units', 0)))
    elif kind is LayerKind.DROPOUT:
        return LayerSpec(kind, rate=float(entry.get('rate', 0.0)))
    elif kind is LayerKind.RESHAPE:
        return LayerSpec(kind, target_shape=tuple(int(d) for d in entry.get('target_shape', ())))
    return LayerSpec(kind)


def layers_from_entries(entries):
    if not isinstance(entries, list):
        raise ConfigError("layers must be a list")
    layers = []
    for i, entry in enumerate(entries):
        try:
            layers.append(layer_from_entry(entry))
        except ConfigError as exc:
            raise ConfigError(f"layer {i}: {exc}") from None
    return tuple(layers)


def input_shape_from_entry(shape):
    if not isinstance(shape, (list, tuple)) or len(shape) != 3:
        raise ShapeError(f"input_shape must be [H, W, C], got {shape!r}")
    try:
        return tuple(int(d) for d in shape)
    except (TypeError, ValueError):
        raise ConfigError(f"input_shape must hold integers, got {shape!r}") from None


def network_to_document(network):
    return {
        'input_shape': list(network.input_shape),
        'loss': network.loss_kind.value,
        'layers': [layer_to_entry(layer) for layer in network.layers],
    }


def network_from_document(doc):
    if not isinstance(doc, dict):
        raise ConfigError("network document must be a mapping")
    for key in ('input_shape', 'layers'):
        if key not in doc:
            raise ConfigError(f"network document is missing '{key}'")
    try:
        loss = LossKind(str(doc.get('loss', LossKind.CATEGORICAL_CE.value)).lower())
    except ValueError:
        raise ConfigError(f"unknown loss {doc.get('loss')!r}") from None
    layers = layers_from_entries(doc['layers'])
    return NetworkSpec(input_shape_from_entry(doc['input_shape']), layers, loss)


def dump_network(network):
    return yaml.safe_dump(network_to_document(network), sort_keys=False, default_flow_style=None)


def load_network(source):
    """Read a NetworkSpec from a YAML path or document text."""
    if isinstance(source, Path) or (isinstance(source, str) and '\n' not in source and Path(source).is_file()):
        text = Path(source).read_text()
    else:
        text = source
    return network_from_document(yaml.safe_load(text))
