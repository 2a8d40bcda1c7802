import numpy as np
import pytest

from sleeping_top.model import TopParameters


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion")


@pytest.fixture
def oblate():
    return TopParameters(1.0, 1.0, 1.0, 1.0, 1.5)


@pytest.fixture
def prolate():
    return TopParameters(1.0, 1.0, 1.0, 1.0, 0.8)


def random_samples(n, seed=0, lo=0.1, hi=5.0):
    """``(params, lam, eta)`` triples with every entry uniform in ``[lo, hi]``."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        m, g, l, I1, I3, lam, eta = rng.uniform(lo, hi, 7)
        if I3 < 2.0 * I1:
            out.append((TopParameters(m, g, l, I1, I3), lam, eta))
    return out


_results = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    key = (marker.args[0], marker.args[1])
    if rep.when == "call" or rep.failed:
        ok = rep.passed and _results.get(key, True)
        _results[key] = ok


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for (n, text), ok in sorted(_results.items()):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d}: {text}")
