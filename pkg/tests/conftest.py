import sys
from pathlib import Path

import numpy as np
import pytest
from scipy.stats import unitary_group

sys.path.insert(0, str(Path(__file__).parent))

from qwalk import walk_family  # noqa: E402


@pytest.fixture
def hadamard():
    return walk_family("hadamard")


@pytest.fixture
def hadamard2d():
    return walk_family("hadamard2d")


@pytest.fixture
def rng():
    return np.random.default_rng(20240515)


def random_unitary(n, seed):
    if n == 1:
        return np.array([[np.exp(1j * np.random.default_rng(seed).uniform(0, 2 * np.pi))]])
    return unitary_group.rvs(n, random_state=seed)


_ACCEPTANCE: dict[int, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when != "call" and not report.failed:
        return
    number, title = marker.args
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    status = "PASS" if report.passed else "FAIL"
    prev = _ACCEPTANCE.get(number)
    if prev is not None:
        status = "FAIL" if "FAIL" in (prev[1], status) else "PASS"
        detail = "; ".join(d for d in (prev[2], detail) if d)
    _ACCEPTANCE[number] = (title, status, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, status, detail = _ACCEPTANCE[number]
        line = f"[{status}] criterion {number}: {title}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))
