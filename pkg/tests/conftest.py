"""Shared fixtures and the acceptance-criteria terminal summary."""

import math

import numpy as np
import pytest

import geowalk as gw

_ACCEPTANCE: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "acceptance" in report.keywords:
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in _ACCEPTANCE:
        tag = "PASS" if outcome == "passed" else outcome.upper()
        terminalreporter.write_line(f"{tag}: {name}")


@pytest.fixture
def cap60():
    """The workhorse body: a 60-degree cap on the 2-sphere."""
    man = gw.Sphere(2)
    return gw.SphericalCap(man, np.array([0.0, 0.0, 1.0]), math.pi / 3)
