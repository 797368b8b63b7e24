import math

import pytest

from burkholder_lab.tree import AdaptedProcess

_ACCEPTANCE: list[str] = []


@pytest.fixture
def record():
    """Collects one PASS/FAIL line per acceptance criterion."""

    def _record(label: str, ok: bool, detail: str = ""):
        _ACCEPTANCE.append(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip())

    return _record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)


def enumerate_paths(proc: AdaptedProcess):
    """Brute-force walk of the tree by explicit recursion over children.

    Yields ``(probability, [X_0, ..., X_n])`` per leaf; deliberately avoids
    the precomputed path arrays of the tree.
    """
    t = proc.tree
    kids = {}
    for i in range(1, t.n_nodes):
        kids.setdefault(int(t.parent[i]), []).append(i)

    def rec(v, prob, path):
        path = path + [float(proc.values[v])]
        if v not in kids:
            yield prob, path
            return
        for c in kids[v]:
            yield from rec(c, prob * float(t.branch_prob[c]), path)

    yield from rec(0, 1.0, [])


def brute_moments(proc: AdaptedProcess, p: float):
    """``(E S_n^p, E (X_n^*)^p, E |X_n|^p)`` by enumeration."""
    es = ex = ea = 0.0
    for prob, path in enumerate_paths(proc):
        s = math.sqrt(sum((b - a) ** 2 for a, b in zip(path, path[1:])))
        m = max(abs(x) for x in path[1:])
        es += prob * s ** p
        ex += prob * m ** p
        ea += prob * abs(path[-1]) ** p
    return es, ex, ea
