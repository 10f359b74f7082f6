"""Shared seeded instance generators for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from tpwa.core import DataSet

EPSILONS = (0.0, 0.05, 0.2)


def random_instance(seed: int, d: int, k_max: int, k_min: int = 3) -> tuple[DataSet, float]:
    """Points in [0, 1]^d with a wiggly response, plus an epsilon from EPSILONS."""
    rng = np.random.default_rng(seed)
    K = int(rng.integers(k_min, k_max + 1))
    X = rng.uniform(0.0, 1.0, size=(K, d))
    freq = rng.uniform(2.0, 6.0, size=d)
    y = np.sin(X @ freq) + 0.1 * rng.normal(size=K)
    eps = float(EPSILONS[int(rng.integers(len(EPSILONS)))])
    return DataSet(X, y[:, None]), eps


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one pass/fail line per acceptance criterion, printed after the run
_criteria: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1][len("test_"):]
        detail = dict(report.user_properties).get("detail", "")
        _criteria[name] = ("PASS" if report.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    key = lambda n: int(n.split("_")[1])
    for name in sorted(_criteria, key=key):
        status, detail = _criteria[name]
        terminalreporter.write_line(f"{status} {name}" + (f": {detail}" if detail else ""))
