import mpmath as mp
import pytest

from mlrhp import curve as cv
from mlrhp.model import ModelDescriptor
from mlrhp.outer import build_sheet_matrix


@pytest.fixture(autouse=True)
def _prec():
    with mp.workprec(256):
        yield


@pytest.fixture(scope="session")
def quarter():
    with mp.workprec(256):
        c = cv.load_preset("laguerre_quarter")
        p = cv.phases(c)
        cs = cv.build_contours(p)
    return c, p, cs


def quarter_model(n, a1=0.5, a2=1.25):
    return ModelDescriptor(a1, a2, n // 4, n - n // 4, 0.25)


@pytest.fixture(scope="session")
def sheet8(quarter):
    with mp.workprec(256):
        m = quarter_model(8)
        return m, build_sheet_matrix(quarter[0], m)
