import numpy as np
import pytest

from sawkit.mbvd import two_branch_model

# Two-mode synthetic truth used by the fit round-trip tests: a strong SH mode
# and a weak Rayleigh mode below it, both inside a 5.7-7.3 GHz sweep.
TRUTH_SH = (6.531e9, 0.22, 300.0)
TRUTH_RAYLEIGH = (5.9e9, 0.02, 150.0)
TRUTH_C0 = 330e-15
TRUTH_RS = 2.0
TRUTH_R0 = 2.0
TRUTH_BAND = (5.7e9, 7.3e9, 2001)


def truth_model():
    return two_branch_model(TRUTH_SH, TRUTH_RAYLEIGH, TRUTH_C0, TRUTH_RS, TRUTH_R0)


def truth_freqs():
    return np.linspace(*TRUTH_BAND)


def add_noise(y, rng, level=0.01):
    """Multiplicative complex Gaussian noise with total RMS ``level``."""
    n = (rng.standard_normal(len(y)) + 1j * rng.standard_normal(len(y))) / np.sqrt(2.0)
    return y * (1.0 + level * n)


def model_params(model):
    out = [model.r_s, model.r_0, model.c_0]
    for b in model.branches:
        out += [b.r_m, b.l_m, b.c_m]
    return np.array(out)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# Lines reported by the acceptance gate, echoed once at the end of the run.
ACCEPT_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPT_LINES):
            terminalreporter.write_line(line)
