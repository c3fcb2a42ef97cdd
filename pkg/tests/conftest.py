import re

import numpy as np
import pytest

from pluripolar.trace_space import PointCloud


def disk_points(r=0.25, grid=25):
    g = np.linspace(-r, r, grid)
    Z = (g[:, None] + 1j * g[None, :]).ravel()
    return Z[np.abs(Z) <= r][:, None]


def curve_points(count=400, lo=0.0, hi=0.25):
    x = np.linspace(lo, hi, count)
    return np.stack([x + 0j, np.exp(x) + 0j], axis=1)


@pytest.fixture(scope="session")
def disk_cloud():
    return PointCloud.from_points(disk_points(), R=1.0, center=[0j], label="disk")


@pytest.fixture(scope="session")
def curve_cloud():
    return PointCloud.from_points(curve_points(), R=1.0, label="exp-curve")


@pytest.fixture(scope="session")
def singleton_cloud():
    return PointCloud.from_points([[0j]], R=1.0, label="point")


_CRIT = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")


def pytest_terminal_summary(terminalreporter):
    rows = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            m = _CRIT.search(getattr(rep, "nodeid", ""))
            if m and rep.when in ("call", "setup"):
                k = int(m.group(1))
                if outcome != "passed" or k not in rows:
                    rows[k] = "PASS" if outcome == "passed" else "FAIL"
    if rows:
        terminalreporter.section("acceptance criteria")
        for k in sorted(rows):
            terminalreporter.write_line(f"criterion {k:2d}: {rows[k]}")
