from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import pytest

from defect_tuning.dataset import ATTRIBUTES, Instance, Release
from defect_tuning.synthetic import synthetic_release, write_corpus

REPO = Path(__file__).resolve().parents[1]
DATA_ENV = "DEFECT_TUNING_DATA"


def promise_dir() -> Path:
    """Where the real PROMISE corpus (CSVs plus *.manifest files) is expected."""
    return Path(os.environ.get(DATA_ENV, REPO / "data" / "promise"))


def random_release(n: int, seed: int, project: str = "p", version_index: int = 0,
                   max_count: int = 3, distinct: bool = False) -> Release:
    rng = np.random.default_rng(seed)
    X = rng.permutation(n * len(ATTRIBUTES)).reshape(n, -1) / 7.0 if distinct else rng.integers(0, 10, (n, len(ATTRIBUTES)))
    counts = rng.integers(0, max_count + 1, n)
    return Release(project, version_index, tuple(
        Instance(tuple(float(v) for v in X[i]), int(counts[i])) for i in range(n)))


@pytest.fixture(scope="session")
def surrogate_corpus(tmp_path_factory) -> Path:
    """Synthetic releases with the published per-release sizes and defect counts."""
    out = tmp_path_factory.mktemp("surrogate")
    write_corpus(out, seed=2016)
    return out


@pytest.fixture(scope="session")
def ant_like():
    return [synthetic_release("ant", k, d, t, seed=3, drift=0.1 * k)
            for k, (d, t) in enumerate([(20, 125), (40, 178), (32, 293)])]


# -- acceptance summary ------------------------------------------------------

_CRITERIA: dict[int, list[str]] = {}


def pytest_runtest_logreport(report):
    n = getattr(report, "criterion", None)
    if n is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _CRITERIA.setdefault(n, []).append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        outcomes = _CRITERIA[n]
        verdict = "PASS" if all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {verdict} ({len(outcomes)} check(s))")
