import pytest

from grindmodm import ProcessConstants, SolveOptions, ideal_point


@pytest.fixture(scope="session")
def constants():
    return ProcessConstants()


@pytest.fixture(scope="session")
def fast_opts():
    return SolveOptions(grid_resolution=21, multistart_count=4)


@pytest.fixture(scope="session")
def fstar(constants):
    return ideal_point(constants)


@pytest.fixture(scope="session")
def fstar_fast(constants, fast_opts):
    return ideal_point(constants, fast_opts)
