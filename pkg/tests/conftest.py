import numpy as np
import pytest

from icebreaker.rng import normals, rng_stream


def ar1(phi, n, gen, burn=100):
    e = normals(gen, n + burn)
    x = np.zeros_like(e)
    for t in range(1, e.size):
        x[t] = phi * x[t - 1] + e[t]
    return x[burn:]


@pytest.fixture
def gen():
    return rng_stream(20240, 0)


_CRITERIA = {}


@pytest.fixture
def criterion():
    """Record ``(id, passed, detail)`` for the acceptance summary."""

    def record(cid, passed, detail=""):
        status = "SKIP" if passed is None else ("PASS" if passed else "FAIL")
        _CRITERIA[cid] = f"criterion {cid}: {status}  {detail}".rstrip()
        print(_CRITERIA[cid])
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_CRITERIA, key=lambda c: int(c)):
        terminalreporter.write_line(_CRITERIA[cid])
