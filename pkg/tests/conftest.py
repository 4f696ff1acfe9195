import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from gvd.dataset import DataSet, make_sites

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def dataset(*args, **kw):
    return DataSet.from_sites(make_sites(*args, **kw))


@pytest.fixture
def triangle():
    return dataset([(0, 0), (2, 0), (0, 2)])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE = []


@pytest.fixture
def criterion():
    def record(n, ok, detail, seconds):
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}  ({seconds:.3f}s)"
        ACCEPTANCE.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
