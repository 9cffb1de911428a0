import numpy as np
import pytest

from tensordmd.rng import SplitMix64


def rand(shape, seed, complex_=False):
    g = SplitMix64(seed)
    x = g.tensor(shape)
    if complex_:
        x = x + 1j * g.tensor(shape)
    return x


def rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return np.linalg.norm((a - b).ravel()) / max(np.linalg.norm(b.ravel()), 1e-300)


@pytest.fixture(scope="session")
def a1_data():
    from tensordmd.bench import TABLE1_SEED
    from tensordmd.dynsys import random_trajectory

    return random_trajectory(10, 1, 6, 20, TABLE1_SEED)


@pytest.fixture(scope="session")
def video():
    from tensordmd.dynsys import synth_video

    return synth_video(seed=0)


ACCEPTANCE_LINES = {}


def record(criterion, ok, detail):
    line = f"{criterion} {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES[criterion] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
