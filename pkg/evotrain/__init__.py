"""

Copyright (c) 2026 evotrain developers

SPDX-License-Identifier: MIT

"""

from .version import __version__

from .constants import LayerKind, LossKind, Mode, OptimizerKind, LocalSearchKind, ScheduleKind, ExperimentKind, FsmState
from .errors import (EvotrainError, ShapeError, ConfigError, BudgetError, TrainingError, DataError, FormatError,
    CountMismatch, TruncationError, ChannelError, SizeError, EmptyGroupError, AlignmentError)

from .network import LayerSpec, NetworkSpec, ParameterVector, Dataset, infer_shapes, count_params, glorot_init
from .network import forward, aggregate_loss, accuracy, evaluate
from .netspec import load_network, dump_network
from .architectures import get_architecture, TRAINING_PRESETS
from .gradient import TrainingConfig, GradientTrainer, train_gradient
from .shade import Individual, ShadeState, shade_init, shade_generation, shade_best, run_shade
from .ils import ShadeIls, lbfgs_fd, mts_ls1, choose_local_search, shade_ils_run
from .schedule import SolverConfig, ScheduledTrainer, parameterized_layers, epoch_plan, update_ratios
from .schedule import scheduled_training_run
from .topo import SearchSpace, EaConfig, Genome, EvaluatedGenome, EvolutionRunner
from .topo import validate_genome, sample_genome, mutate, crossover, evaluate_genome
from .topo import mu_plus_lambda_run, random_search_baseline
from .data import RawImageSet, load_idx, load_raw, to_grayscale, normalize, split_train_val, subsample, synthetic_blobs
from .record import RunRecord
from .config import ExperimentConfig, load_config
from .bench import ExperimentRunner, run_experiment, aggregate, emit_plotdata
