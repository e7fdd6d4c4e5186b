import numpy as np
import pytest

from hazecascade.dataset import far_suite, procedural_suite


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def suite():
    return procedural_suite()


@pytest.fixture(scope="session")
def deep_suite():
    return far_suite()


_VERDICTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_VERDICTS] = []


@pytest.fixture
def criterion(request, capsys):
    """Record and print a PASS/FAIL line for an acceptance criterion; returns the verdict."""
    lines = request.config.stash[_VERDICTS]

    def record(name, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else "")
        lines.append(line)
        with capsys.disabled():
            print("\n" + line)
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
