"""Per-criterion pass/fail summary for the acceptance suite.

Acceptance tests carry ``@pytest.mark.criterion(n, title)``.  A criterion
passes when every test tagged with it passes; skipped tests are counted and
shown next to the verdict.  Tests may append measured figures to
``REPORT`` through the ``report`` fixture; they are printed under the
verdicts.
"""
import warnings
from collections import defaultdict
from functools import lru_cache

import pytest

from voidsel.evaluation import DATASETS, cross_validate_sets, load_dataset, reduce_2d, select_all
from voidsel.selection import SelectorConfig, aps, cnn, enn, ips

EXPERIMENT = SelectorConfig(eps0=0.001, domain="circle")

REPORT: list[str] = []

_criterion_of: dict[str, int] = {}
_title: dict[int, str] = {}
_outcomes: dict[int, list[str]] = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion the test belongs to")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _criterion_of[item.nodeid] = m.args[0]
            if len(m.args) > 1:
                _title[m.args[0]] = m.args[1]


def pytest_runtest_logreport(report):
    n = _criterion_of.get(report.nodeid)
    if n is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _outcomes[n].append(report.outcome)


@pytest.fixture
def report():
    return REPORT.append


@lru_cache(maxsize=None)
def benchmark(name):
    """10x10 cross-validation of every selector on one bundled dataset in
    its default 2-D reduction.  Returns the metrics per named set and, per
    run, how many points professor and student shared."""
    d = reduce_2d(load_dataset(name), DATASETS[name][2])
    clashes = []

    def selectors(X, y):
        p, s = aps(X, y, EXPERIMENT)
        clashes.append(len(set(p.indices) & set(s.indices)))
        return {"full": select_all(X, y), "ips": ips(X, y, EXPERIMENT), "cnn": cnn(X, y, seed=0),
                "enn": enn(X, y, k=3), "professor": p, "both": p.indices + s.indices}

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        runs = cross_validate_sets(d, selectors, folds=10, repeats=10, seed=0)
    return runs, clashes


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_outcomes):
        res = _outcomes[n]
        ok = "failed" not in res
        skipped = res.count("skipped")
        note = f" ({skipped} skipped)" if skipped else ""
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}{note}  {_title.get(n, '')}".rstrip()
        terminalreporter.write_line(line, green=ok, red=not ok)
    if REPORT:
        terminalreporter.write_line("")
        for line in REPORT:
            terminalreporter.write_line(line)
