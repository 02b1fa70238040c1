from pathlib import Path

import numpy as np
import pytest

from graphspread.graph import WeightedGraph, is_connected

DATA = Path(__file__).parent / "data"


def triangle(eps: float) -> WeightedGraph:
    """Nodes (u0, u, v) = (0, 1, 2); W[u0,u] = eps, W[u0,v] = 1, W[u,v] = 2."""
    return WeightedGraph(np.array([[0.0, eps, 1.0], [eps, 0.0, 2.0], [1.0, 2.0, 0.0]]))


def random_connected(rng, n: int, p: float = 0.5, weighted: bool = True) -> WeightedGraph:
    while True:
        mask = np.triu(rng.random((n, n)) < p, 1)
        w = np.where(mask, rng.uniform(0.05, 1.0, (n, n)) if weighted else 1.0, 0.0)
        g = WeightedGraph(w + w.T)
        if is_connected(g):
            return g


def load_plotted(name: str) -> np.ndarray:
    return np.loadtxt(DATA / name, delimiter=",", skiprows=1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance reporting: one PASS/FAIL line per criterion in the terminal summary

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call" and not report.failed:
        return
    number, title = mark.args
    entry = _CRITERIA.setdefault(number, {"title": title, "ok": True, "detail": ""})
    if report.failed:
        entry["ok"] = False
        entry["detail"] = str(report.longrepr.reprcrash.message if hasattr(report.longrepr, "reprcrash") else report.longrepr).splitlines()[0]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        line = f"criterion {number} ({entry['title']}): {'PASS' if entry['ok'] else 'FAIL'}"
        if not entry["ok"]:
            line += f" -- {entry['detail']}"
        terminalreporter.write_line(line)
