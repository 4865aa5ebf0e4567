import numpy as np
import pytest
from hypothesis import settings

from umbrella import make_mapping, make_special

ACCEPTANCE_LINES: list[str] = []

# reproducible property tests
settings.register_profile("repo", derandomize=True, deadline=None)
settings.load_profile("repo")


@pytest.fixture
def worked():
    """F_p with a=1, b=2 and centers (0,0), (1,0), (0,1)."""
    return make_special("ellipse_circle", [(0, 0), (1, 0), (0, 1)], 1.0, 2.0)


@pytest.fixture
def worked4():
    return make_mapping([[1, 2], [1, 1], [1, 1], [1, 1]], [(0, 0), (1, 0), (0, 1), (1, 1)])


@pytest.fixture
def collinear():
    return make_special("ellipse_circle", [(0, 0), (1, 0), (2, 0)], 1.0, 2.0)


@pytest.fixture
def record_criterion():
    def record(number: int, title: str, ok: bool, detail: str) -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return record


def random_general_mapping(rng: np.random.Generator, ell: int, spread: float = 3.0):
    signs = rng.choice([-1.0, 1.0], size=(ell, 2))
    A = signs * rng.uniform(0.2, 3.0, size=(ell, 2))
    P = rng.uniform(-spread, spread, size=(ell, 2))
    return make_mapping(A, P)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

