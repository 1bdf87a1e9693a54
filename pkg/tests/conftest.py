import pytest

from fountainflow import gf256


@pytest.fixture(scope="session", autouse=True)
def _warm_numba_kernels():
    gf256.warm_kernels()
