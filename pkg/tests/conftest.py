import numpy as np
import pytest

ACCEPTANCE_LINES = []


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=42, help="seed for randomized tests")


@pytest.fixture
def seed(request):
    return request.config.getoption("--seed")


@pytest.fixture
def rng(seed):
    return np.random.default_rng(seed)


@pytest.fixture
def report():
    """Record a one-line pass/fail verdict for the acceptance summary."""

    def _record(number, ok, detail):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
