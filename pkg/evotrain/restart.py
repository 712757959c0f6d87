"""

Copyright (c) 2026 evotrain developers

SPDX-License-Identifier: MIT

"""


class Restart:
    """Stagnation counter that fires ``_handle_restart`` after a run of low gains."""

    def _init_restart(self, threshold=0.05, patience=3):
        self.restart_threshold = threshold
        self.restart_patience = patience
        self.stagnation_counter = 0
        self.restart_count = 0

    def register_improvement(self, ratio):
        if ratio < self.restart_threshold:
            self.stagnation_counter += 1
        else:
            self.stagnation_counter = 0

        if self.stagnation_counter >= self.restart_patience:
            self.assert_restart()
            return True
        return False

    def assert_restart(self):
        self.restart_count += 1
        self._handle_restart()
        self.stagnation_counter = 0

    def _handle_restart(self):
        pass
