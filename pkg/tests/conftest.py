import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_state(rng, d, n, lam=1.0):
    from parbandit.linalg import make_regularized

    s = make_regularized(d, lam)
    xs = rng.standard_normal((n, d))
    for x in xs:
        s.update(x)
    return s, xs


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_RESULTS: dict = {}


def report(number: int, title: str, passed: bool, detail: str) -> None:
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {title} -- {detail}"
    ACCEPTANCE_RESULTS[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[n])
