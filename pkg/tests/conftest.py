"""Shared test doubles standing in for numpy Generators.

The samplers only ever call ``standard_normal(n)``, so any object with that
method can be injected to make the noise deterministic, recordable, or
replayable in tests.

Also hosts the acceptance results table: the end-to-end tests register one
PASS/FAIL line apiece, replayed after the run so the lines are visible even
for passing tests (pytest captures their stdout otherwise).
"""

import numpy as np

_acceptance_lines = []


def record_acceptance_line(line):
    _acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


class ZeroNoiseRng:
    """Noise-free observations: every draw is exactly zero."""

    def standard_normal(self, n):
        return np.zeros(n)


class ConstantRng:
    def __init__(self, value):
        self.value = float(value)

    def standard_normal(self, n):
        return np.full(n, self.value)


class CountingRng:
    """Wraps a real generator and counts the total draws requested."""

    def __init__(self, rng):
        self.rng = rng
        self.total = 0

    def standard_normal(self, n):
        self.total += int(n)
        return self.rng.standard_normal(n)


class RecordingRng:
    """Wraps a real generator and keeps every draw for later replay."""

    def __init__(self, rng):
        self.rng = rng
        self.draws = []

    def standard_normal(self, n):
        w = self.rng.standard_normal(n)
        self.draws.append(w)
        return w


class ReplayRng:
    """Plays back a prepared sequence of draws, checking requested sizes."""

    def __init__(self, draws):
        self._draws = iter(draws)

    def standard_normal(self, n):
        w = next(self._draws)
        assert w.size == n
        return w
