"""Shared fixtures and the per-criterion PASS/FAIL report."""

import json

import numpy as np
import pytest

from bilinstab import cli

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when != "call" and not rep.failed:
        return
    number, title = marker.args
    ok = rep.passed and rep.when == "call"
    prev_ok, _, n = _CRITERIA.get(number, (True, title, 0))
    _CRITERIA[number] = (prev_ok and ok, title, n + 1)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_CRITERIA):
        ok, title, n = _CRITERIA[number]
        terminalreporter.write_line(
            f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title} ({n} test{'s' * (n != 1)})"
        )


class ScenarioRuns:
    """Run catalog scenarios once per session and keep their outputs."""

    def __init__(self, root):
        self.root = root
        self._cache = {}

    def __call__(self, name, **overrides):
        key = (name, tuple(sorted(overrides.items())))
        if key not in self._cache:
            tag = "_".join([name] + [f"{k}-{v}" for k, v in sorted(overrides.items())])
            out = self.root / tag
            manifest = cli.run_scenario(name, {k: str(v) for k, v in overrides.items()},
                                        out, quiet=True)
            self._cache[key] = (manifest, out)
        return self._cache[key]

    @staticmethod
    def columns(out):
        with open(out / "trajectory.csv", encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
        data = cli.read_csv(out / "trajectory.csv")
        return {h: data[:, i] for i, h in enumerate(header)}

    @staticmethod
    def manifest(out):
        with open(out / "manifest.json", encoding="utf-8") as fh:
            return json.load(fh)


@pytest.fixture(scope="session")
def scenario_runs(tmp_path_factory):
    return ScenarioRuns(tmp_path_factory.mktemp("scenarios"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
