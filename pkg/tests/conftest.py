import functools

import pytest
from hypothesis import settings

import acceptance_log
from reflab.core import generate_slice, universal

settings.register_profile("repo", deadline=None, derandomize=True, max_examples=60)
settings.load_profile("repo")


@functools.lru_cache(maxsize=None)
def u3(depth: int):
    return generate_slice(universal(3), depth)


@pytest.fixture(scope="session")
def universal_slice():
    return u3


def pytest_terminal_summary(terminalreporter):
    if acceptance_log.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.lines():
            terminalreporter.write_line(line)
