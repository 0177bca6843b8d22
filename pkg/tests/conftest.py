import pytest

from capdemand import DemandCurve, builtin_series, filter_window

PAPER_A = 483_509_000.0
PAPER_B = 6_621_000.0


@pytest.fixture(scope="session")
def series():
    return builtin_series()


@pytest.fixture(scope="session")
def sample(series):
    return filter_window(series, (2012, 2019))


@pytest.fixture
def paper_curve():
    return DemandCurve.specified(PAPER_A, PAPER_B)
