import numpy as np
import pytest
from hypothesis import settings

from bjp.dataset import Dataset
from bjp.graph import UndirectedGraph, gen_hub

settings.register_profile("default", deadline=None)
settings.load_profile("default")


@pytest.fixture
def star():
    return gen_hub(4, 1)


@pytest.fixture
def star_data():
    """Data whose strongest dependencies follow the star 0-{1,2,3}."""
    rng = np.random.default_rng(7)
    x0 = rng.integers(0, 2, 2000)
    cols = [x0] + [np.where(rng.random(2000) < 0.85, x0, 1 - x0) for _ in range(3)]
    return Dataset(np.stack(cols, axis=1))


def random_dataset(rng, n_rows, n_vars, card=2):
    return Dataset(rng.integers(0, card, size=(n_rows, n_vars)), [card] * n_vars)


def random_graph(rng, n, p=0.4):
    return UndirectedGraph(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p])


# Acceptance-criterion lines, printed again at the end of the session.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
