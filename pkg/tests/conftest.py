import re

import numpy as np
import pytest

from hetobj import demo

_ACCEPTANCE = {}


@pytest.fixture(scope="session")
def slab():
    return demo.linear_slab()


@pytest.fixture(scope="session")
def disk():
    return demo.offset_disk()


@pytest.fixture(scope="session")
def wedge():
    return demo.hybrid_wedge()


@pytest.fixture(scope="session")
def stacked():
    return demo.stacked_boxes()


@pytest.fixture(scope="session")
def cube():
    return demo.homogeneous_cube()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def interior_points(obj, n, rng, margin=1e-6):
    """Uniform random points strictly inside ``obj`` (rejection sampling)."""
    lo, hi = obj.bounds
    out = []
    have = 0
    while have < n:
        p = rng.uniform(lo + margin, hi - margin, size=(2 * n, 3))
        keep = np.zeros(len(p), dtype=bool)
        for cell in obj.leaf_cells:
            keep |= cell.geometry.locator.contains(p)
        out.append(p[keep])
        have += int(keep.sum())
    return np.vstack(out)[:n]


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", report.nodeid)
    if m and report.when == "call":
        _ACCEPTANCE[int(m.group(1))] = report.outcome
    elif m and report.when == "setup" and report.outcome != "passed":
        _ACCEPTANCE[int(m.group(1))] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        status = "PASS" if _ACCEPTANCE[n] == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d}: {status}")
