import math

import pytest
from hypothesis import settings, strategies as st

from qexp.base import BasePair, new_base, reference_base
from qexp.stepfn import StepFunction

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

PHI = (1 + math.sqrt(5)) / 2
# the rounded pair printed with the worked example; fine for single-step arithmetic
ROUNDED = (2.1479, 1.46557)

# filled by test_acceptance, echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def ref() -> BasePair:
    return reference_base()


@pytest.fixture(scope="session")
def rounded() -> BasePair:
    return new_base(*ROUNDED)


@pytest.fixture(scope="session")
def boundary() -> BasePair:
    return new_base(3.0, 1.5)


@pytest.fixture(scope="session")
def golden() -> BasePair:
    return new_base(PHI, PHI)


@st.composite
def strict_bases(draw, margin=0.02):
    q1 = draw(st.floats(1.15, 3.5))
    hi = q1 / (q1 - 1.0) - margin
    q0 = draw(st.floats(1.15, max(1.16, hi)))
    if q0 + q1 <= q0 * q1:
        q0 = 1.15
    return new_base(q0, q1)


@st.composite
def step_functions(draw, R=None, integer_values=False, nonneg=False, max_pieces=8):
    """Step functions on [0, R] with breakpoints on a coarse grid (so none merge)."""
    if R is None:
        R = draw(st.floats(0.5, 4.0))
    k = draw(st.integers(0, max_pieces - 1))
    grid = sorted(draw(st.sets(st.integers(1, 63), min_size=k, max_size=k)))
    bps = [R * g / 64 for g in grid]
    lo = 0 if nonneg else -5
    if integer_values:
        vals = draw(st.lists(st.integers(lo, 5), min_size=k + 1, max_size=k + 1))
    else:
        vals = draw(st.lists(st.floats(float(lo), 5.0), min_size=k + 1, max_size=k + 1))
    return StepFunction(R, bps, [float(v) for v in vals])


def on_grid(Q: BasePair, f_values):
    """Step function on I_Q with equally spaced breakpoints and the given values."""
    n = len(f_values)
    bps = [Q.right * i / n for i in range(1, n)]
    return StepFunction(Q.right, bps, f_values)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
