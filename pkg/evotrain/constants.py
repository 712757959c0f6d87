"""

Copyright (c) 2026 evotrain developers

SPDX-License-Identifier: MIT

"""

import enum


# layer alphabet
class LayerKind(enum.Enum):
    CONV2D   = "conv2d"
    MAXPOOL  = "maxpool"
    AVGPOOL  = "avgpool"
    DENSE    = "dense"
    DROPOUT  = "dropout"
    FLATTEN  = "flatten"
    RESHAPE  = "reshape"


PARAMETERIZED_KINDS = frozenset({LayerKind.CONV2D, LayerKind.DENSE})


class LossKind(enum.Enum):
    BINARY_CE      = "binary"
    CATEGORICAL_CE = "categorical"


class Mode(enum.Enum):
    TRAIN = "train"
    EVAL  = "eval"


class OptimizerKind(enum.Enum):
    SGD     = "sgd"
    ADAM    = "adam"
    RMSPROP = "rmsprop"
    ADAGRAD = "adagrad"
    ADAMAX  = "adamax"
    NADAM   = "nadam"


# learning rates used when an optimizer is picked without one (topology search)
default_learning_rate = {
    OptimizerKind.SGD:     0.01,
    OptimizerKind.ADAM:    0.001,
    OptimizerKind.RMSPROP: 0.001,
    OptimizerKind.ADAGRAD: 0.01,
    OptimizerKind.ADAMAX:  0.002,
    OptimizerKind.NADAM:   0.002,
}


class LocalSearchKind(enum.Enum):
    LBFGS_FD = "lbfgs"
    MTS_LS1  = "mts"


# LBFGS_FD wins exact ties
LOCAL_SEARCH_ORDER = (LocalSearchKind.LBFGS_FD, LocalSearchKind.MTS_LS1)


class ScheduleKind(enum.Enum):
    FULL   = "full"
    DOWN   = "down"
    UP     = "up"
    A_DOWN = "a-down"
    A_UP   = "a-up"


# order of the first epoch for each schedule
schedule_first_pass_reversed = {
    ScheduleKind.FULL:   False,
    ScheduleKind.DOWN:   False,
    ScheduleKind.UP:     True,
    ScheduleKind.A_DOWN: False,
    ScheduleKind.A_UP:   True,
}

ADAPTIVE_SCHEDULES = frozenset({ScheduleKind.A_DOWN, ScheduleKind.A_UP})


class ExperimentKind(enum.Enum):
    GRADIENT_TRAIN  = "gradient"
    SHADE_ILS_TRAIN = "shade-ils"
    TOPO_EVOLVE     = "topo"
    RANDOM_TOPO     = "random-topo"


# tensor rank states of the layer grammar
class FsmState(enum.Enum):
    SPATIAL = 3
    FLAT    = 1


fsm_transitions = {
    FsmState.SPATIAL: {
        LayerKind.CONV2D:  FsmState.SPATIAL,
        LayerKind.MAXPOOL: FsmState.SPATIAL,
        LayerKind.DROPOUT: FsmState.SPATIAL,
        LayerKind.FLATTEN: FsmState.FLAT,
    },
    FsmState.FLAT: {
        LayerKind.DENSE:   FsmState.FLAT,
        LayerKind.DROPOUT: FsmState.FLAT,
        LayerKind.RESHAPE: FsmState.SPATIAL,
    },
}


# probability clamp applied before every log
PROB_EPS = 1e-12
