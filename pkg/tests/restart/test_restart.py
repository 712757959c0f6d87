#!/usr/bin/env python
"""

Copyright (c) 2026 evotrain developers

SPDX-License-Identifier: MIT

"""

import pytest

from evotrain.restart import Restart


class TB(Restart):
    def __init__(self, threshold=0.05, patience=3):
        self._init_restart(threshold, patience)
        self.seen = []

    def _handle_restart(self):
        self.seen.append(self.stagnation_counter)


def test_fires_after_patience():
    tb = TB()

    assert not tb.register_improvement(0.01)
    assert not tb.register_improvement(0.02)
    assert tb.register_improvement(0.04)

    assert tb.seen == [3]
    assert tb.restart_count == 1
    assert tb.stagnation_counter == 0


def test_good_step_resets_counter():
    tb = TB()
    for ratio in (0.01, 0.02, 0.5, 0.01, 0.0):
        assert not tb.register_improvement(ratio)
    assert tb.stagnation_counter == 2
    assert tb.restart_count == 0


@pytest.mark.parametrize("threshold, patience, ratios, restarts", [
    (0.05, 3, [0.05] * 6, 0),
    (0.05, 3, [0.0] * 6, 2),
    (0.1, 1, [0.09, 0.2, 0.09], 2),
    (0.05, 2, [-0.3, 0.01, 0.01], 1),
])
def test_restart_counts(threshold, patience, ratios, restarts):
    tb = TB(threshold, patience)
    for ratio in ratios:
        tb.register_improvement(ratio)
    assert tb.restart_count == restarts


def test_base_restart_is_noop():
    class Plain(Restart):
        pass

    plain = Plain()
    plain._init_restart()
    plain.assert_restart()
    assert plain.restart_count == 1
