import numpy as np
from pytest import fixture, mark

from solharm.harmonic import HarmonicFunction
from solharm.hyperbolic import RadialEigenfunction
from solharm.liegroup import SolGroup


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False, help='run acceptance-scale tests')


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: acceptance-scale run, skipped without --runslow')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


@fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240607)


@fixture(params=[0.0, 0.5, 1.0, 2.0], ids=lambda a: f'a={a:g}')
def group(request) -> SolGroup:
    return SolGroup(request.param)


@fixture(scope='session')
def eigenfunction() -> RadialEigenfunction:
    return RadialEigenfunction.solve()


@fixture(scope='session')
def hf(eigenfunction) -> HarmonicFunction:
    return HarmonicFunction(eigenfunction)
