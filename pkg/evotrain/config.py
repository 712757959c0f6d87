"""

Copyright (c) 2026 evotrain developers

SPDX-License-Identifier: MIT

Experiment configuration files (YAML), one flat section per concern:

    experiment:
      kind: shade-ils          # gradient | shade-ils | topo | random-topo
      runs: 5
      base_seed: 0
      output_dir: results/mnist-shade
    data:
      source: idx              # idx | raw | synthetic
      train_images: data/train-images-idx3-ubyte.gz
      train_labels: data/train-labels-idx1-ubyte.gz
      test_images: data/t10k-images-idx3-ubyte.gz
      test_labels: data/t10k-labels-idx1-ubyte.gz
      train_size: 10000
      test_size: 5000
    network:
      spec: ../specs/mnist.yaml
    training: {optimizer: adam, learning_rate: 0.01, batch_size: 512, epochs: 20}
    solver: {np_size: 10, n_eval: 200, epochs: 20}
    schedule: {kinds: [full, a-up]}
    search: {lambda: 10, mu: 5, ngen: 20, fast: false}

Relative paths are resolved against the directory of the config file.

"""

import dataclasses
import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml

from .constants import ExperimentKind, ScheduleKind
from .errors import ConfigError, DataError, EvotrainError
from .gradient import TrainingConfig
from .schedule import SolverConfig
from .topo import EaConfig, SearchSpace

DATA_SOURCES = ('idx', 'raw', 'synthetic')


@dataclass(frozen=True)
class ExperimentSection:
    kind: ExperimentKind = ExperimentKind.GRADIENT_TRAIN
    name: str = "experiment"
    runs: int = 5
    base_seed: int = 0
    output_dir: str = "results"
    threads: Optional[int] = None

    def __post_init__(self):
        try:
            object.__setattr__(self, 'kind', ExperimentKind(self.kind))
        except ValueError:
            raise ConfigError(f"unknown experiment kind {self.kind!r}") from None
        if self.runs < 1:
            raise ConfigError(f"runs must be at least 1, got {self.runs}")
        if self.base_seed < 0:
            raise ConfigError(f"base_seed must be non-negative, got {self.base_seed}")
        if self.threads is not None and self.threads < 1:
            raise ConfigError(f"threads must be positive, got {self.threads}")


@dataclass(frozen=True)
class DataSection:
    source: str = "synthetic"
    train_images: Optional[str] = None
    train_labels: Optional[str] = None
    test_images: Optional[str] = None
    test_labels: Optional[str] = None
    train_size: Optional[int] = None
    test_size: Optional[int] = None
    stratified: bool = True
    subsample_seed: int = 0
    grayscale: bool = False
    num_classes: Optional[int] = None
    # synthetic source
    classes: int = 2
    per_class: int = 100
    test_per_class: int = 50
    image_hw: tuple = (16, 16)
    channels: int = 1
    noise: float = 0.1
    synthetic_seed: int = 0

    def __post_init__(self):
        if self.source not in DATA_SOURCES:
            raise ConfigError(f"unknown data source {self.source!r}, expected one of {list(DATA_SOURCES)}")
        object.__setattr__(self, 'image_hw', tuple(int(d) for d in self.image_hw))
        if self.source != 'synthetic':
            for name in ('train_images', 'train_labels'):
                if getattr(self, name) is None:
                    raise ConfigError(f"data source {self.source} needs '{name}'")
            if (self.test_images is None) != (self.test_labels is None):
                raise ConfigError("test_images and test_labels go together")
        for name in ('train_size', 'test_size'):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ConfigError(f"{name} must be positive, got {value}")

    def paths(self):
        return [p for p in (self.train_images, self.train_labels, self.test_images, self.test_labels)
                if p is not None]


@dataclass(frozen=True)
class NetworkSection:
    spec: Optional[str] = None
    architecture: Optional[str] = None

    def __post_init__(self):
        if self.spec is not None and self.architecture is not None:
            raise ConfigError("network takes either 'spec' or 'architecture', not both")


@dataclass(frozen=True)
class ScheduleSection:
    kinds: tuple = (ScheduleKind.A_UP,)

    def __post_init__(self):
        kinds = self.kinds
        if isinstance(kinds, (str, ScheduleKind)):
            kinds = (kinds,)
        try:
            kinds = tuple(ScheduleKind(k) for k in kinds)
        except ValueError:
            raise ConfigError(f"unknown schedule in {self.kinds!r}") from None
        if not kinds:
            raise ConfigError("schedule needs at least one kind")
        object.__setattr__(self, 'kinds', kinds)


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: ExperimentSection = field(default_factory=ExperimentSection)
    data: DataSection = field(default_factory=DataSection)
    network: NetworkSection = field(default_factory=NetworkSection)
    training: TrainingConfig = field(default_factory=TrainingConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    schedule: ScheduleSection = field(default_factory=ScheduleSection)
    search: EaConfig = field(default_factory=EaConfig)

    @property
    def kind(self):
        return self.experiment.kind

    @property
    def seeds(self):
        return [self.experiment.base_seed + i for i in range(self.experiment.runs)]

    def validate(self):
        kind = self.kind
        if kind in (ExperimentKind.GRADIENT_TRAIN, ExperimentKind.SHADE_ILS_TRAIN):
            if self.network.spec is None and self.network.architecture is None:
                raise ConfigError(f"{kind.value} experiments need a network spec or architecture")
        if self.network.spec is not None and not Path(self.network.spec).is_file():
            raise ConfigError(f"network spec not found: {self.network.spec}")
        for path in self.data.paths():
            if not Path(path).is_file():
                raise DataError(f"dataset file not found: {path}")
        return self

    def with_overrides(self, seed=None, runs=None, threads=None, fast=None):
        experiment = self.experiment
        if seed is not None:
            experiment = dataclasses.replace(experiment, base_seed=seed)
        if runs is not None:
            experiment = dataclasses.replace(experiment, runs=runs)
        if threads is not None:
            experiment = dataclasses.replace(experiment, threads=threads)
        search = self.search
        if fast is not None:
            search = dataclasses.replace(search, fast=fast)
        return dataclasses.replace(self, experiment=experiment, search=search)

    def resolved(self):
        """Every setting with defaults filled in, as plain YAML-safe data."""
        doc = {
            'experiment': _plain(self.experiment),
            'data': _plain(self.data),
            'network': _plain(self.network),
            'training': _plain(self.training, exclude=('seed',)),
            'solver': _plain(self.solver, exclude=('seed',)),
            'schedule': _plain(self.schedule),
            'search': _plain(self.search, exclude=('seed', 'space')),
        }
        doc['search']['lambda'] = doc['search'].pop('lambda_')
        doc['search'].update(_plain(self.search.space))
        return doc


def _plain_value(value):
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, (tuple, list)):
        return [_plain_value(v) for v in value]
    return value


def _plain(section, exclude=()):
    return {f.name: _plain_value(getattr(section, f.name))
            for f in dataclasses.fields(section) if f.name not in exclude}


def _build(cls, name, entries, exclude=()):
    if entries is None:
        entries = {}
    if not isinstance(entries, dict):
        raise ConfigError(f"section '{name}' must be a mapping")
    allowed = {f.name for f in dataclasses.fields(cls)} - set(exclude)
    unknown = set(entries) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in '{name}': {sorted(unknown)}")
    try:
        return cls(**entries)
    except EvotrainError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"section '{name}': {exc}") from None


def _resolve_path(value, base):
    if value is None:
        return None
    if not isinstance(value, (str, Path)):
        raise ConfigError(f"expected a path, got {value!r}")
    path = Path(value).expanduser()
    if not path.is_absolute() and base is not None:
        path = base / path
    return str(path)


SECTIONS = ('experiment', 'data', 'network', 'training', 'solver', 'schedule', 'search')


def _entries(doc, name):
    entries = doc.get(name) or {}
    if not isinstance(entries, dict):
        raise ConfigError(f"section '{name}' must be a mapping")
    return dict(entries)


def config_from_document(doc, base=None):
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError("experiment config must be a mapping")
    unknown = set(doc) - set(SECTIONS)
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")

    data = _entries(doc, 'data')
    for key in ('train_images', 'train_labels', 'test_images', 'test_labels'):
        if key in data:
            data[key] = _resolve_path(data[key], base)

    network = _entries(doc, 'network')
    if 'spec' in network:
        network['spec'] = _resolve_path(network['spec'], base)

    solver = _entries(doc, 'solver')
    for key in ('bounds', 'local_searches'):
        if key in solver:
            if not isinstance(solver[key], (list, tuple)):
                raise ConfigError(f"solver {key} must be a list, got {solver[key]!r}")
            solver[key] = tuple(solver[key])

    search = _entries(doc, 'search')
    if 'lambda' in search:
        search['lambda_'] = search.pop('lambda')
    space_keys = {f.name for f in dataclasses.fields(SearchSpace)}
    space = {k: search.pop(k) for k in list(search) if k in space_keys}

    config = ExperimentConfig(
        experiment=_build(ExperimentSection, 'experiment', doc.get('experiment')),
        data=_build(DataSection, 'data', data),
        network=_build(NetworkSection, 'network', network),
        training=_build(TrainingConfig, 'training', doc.get('training'), exclude=('seed',)),
        solver=_build(SolverConfig, 'solver', solver, exclude=('seed',)),
        schedule=_build(ScheduleSection, 'schedule', doc.get('schedule')),
        search=dataclasses.replace(_build(EaConfig, 'search', search, exclude=('seed', 'space')),
            space=_build(SearchSpace, 'search', space)),
    )
    return config


def load_config(source):
    """Read an ExperimentConfig from a YAML path or document text."""
    if isinstance(source, Path) or (isinstance(source, str) and '\n' not in source
            and (source.endswith(('.yaml', '.yml')) or Path(source).is_file())):
        path = Path(source)
        try:
            text = path.read_text()
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        base = path.parent
    else:
        text, base = source, None
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from None
    return config_from_document(doc, base)
