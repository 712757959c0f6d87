"""

Copyright (c) 2026 evotrain developers

SPDX-License-Identifier: MIT

"""


class EvotrainError(Exception):
    pass


class ShapeError(EvotrainError, ValueError):
    pass


class ConfigError(EvotrainError, ValueError):
    pass


class BudgetError(EvotrainError, ValueError):
    pass


class TrainingError(EvotrainError, RuntimeError):
    pass


class DataError(EvotrainError):
    pass


class FormatError(DataError):
    pass


class CountMismatch(DataError):
    pass


class TruncationError(DataError):
    pass


class ChannelError(DataError):
    pass


class SizeError(DataError):
    pass


class EmptyGroupError(EvotrainError, ValueError):
    pass


class AlignmentError(EvotrainError, ValueError):
    pass
