import logging
import os

from pytest import mark, raises

from solharm.config import DEFAULTS, THREADS_ENV, configure_logging, max_workers


def test_defaults():
    assert DEFAULTS.r_max == 20.0
    assert DEFAULTS.grid == '-2:2:21,-2:2:21,-2:2:21'
    assert DEFAULTS.analytic_tolerance < DEFAULTS.fd_tolerance


def test_max_workers_unset(monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)
    assert max_workers() == (os.cpu_count() or 1)


def test_max_workers_set(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, '3')
    assert max_workers() == 3


@mark.parametrize('raw', ['0', '-2', 'two', '1.5'])
def test_max_workers_rejects(monkeypatch, raw):
    monkeypatch.setenv(THREADS_ENV, raw)
    with raises(ValueError, match=THREADS_ENV):
        max_workers()


def test_configure_logging_levels(monkeypatch):
    levels = []
    monkeypatch.setattr(logging, 'basicConfig', lambda **kwargs: levels.append(kwargs['level']))
    for verbosity in (0, 1, 2, 5):
        configure_logging(verbosity)
    assert levels == [logging.WARNING, logging.INFO, logging.DEBUG, logging.DEBUG]
