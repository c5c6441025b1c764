from __future__ import annotations

import os
from functools import lru_cache

import pytest

from amalgam import quatorders as qo
from amalgam import treequot as tq
from amalgam.cli import compute
from amalgam.realcyc import build_field


def pytest_collection_modifyitems(config, items):
    if os.environ.get("AMALGAM_STRETCH") == "1":
        return
    skip = pytest.mark.skip(reason="long-running; set AMALGAM_STRETCH=1")
    for item in items:
        if "stretch" in item.keywords:
            item.add_marker(skip)


@lru_cache(maxsize=None)
def field(n: int):
    return build_field(n)


@lru_cache(maxsize=None)
def algebra(n: int) -> qo.QuatAlgebra:
    return qo.QuatAlgebra(field(n))


@lru_cache(maxsize=None)
def seed(n: int):
    return qo.standard_order(algebra(n))


@lru_cache(maxsize=None)
def quotient(n: int, flavor: str) -> tq.QuotientGraph:
    alg = algebra(n)
    g = tq.bfs_quotient(alg, flavor)
    tq.locate_T_vertex(alg, g)
    return g


@lru_cache(maxsize=None)
def result(n: int, flavor: str):
    """Full pipeline output (graph, graph of groups, presentation, masses)."""
    return compute(n, flavor, alg=algebra(n))


# -- acceptance summary: one line per criterion --------------------------------

_CRITERIA: dict[int, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number")


def pytest_runtest_logreport(report):
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        k = getattr(report, "criterion", None)
        if k is not None:
            _CRITERIA.setdefault(k, []).append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        rep.criterion = mark.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        outs = _CRITERIA[k]
        if "failed" in outs:
            state = "FAIL"
        elif all(o == "skipped" for o in outs):
            state = "SKIPPED (set AMALGAM_STRETCH=1)"
        else:
            state = "PASS"
        terminalreporter.write_line(f"criterion {k}: {state} ({outs.count('passed')}/{len(outs)} checks passed)")
