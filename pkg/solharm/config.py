"""Defaults shared by the library and the command line, plus the thread cap read from the environment."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass

THREADS_ENV = 'SOLHARM_THREADS'
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


@dataclass(frozen=True)
class Defaults:
    """Numerical defaults.

    Attributes:
        r_max: Largest radius the radial eigenfunction is integrated to.
        rtol: Relative tolerance of the radial ODE solve.
        atol: Absolute tolerance of the radial ODE solve.
        series_radius: Below this radius the eigenfunction is the power series, above it the ODE.
        exclusion_radius: Derivatives are refused this close to the base point.
        fd_step: Finite-difference step of the Laplacian stencil.
        grid: Default verification grid, ``x0:x1:nx,y0:y1:ny,z0:z1:nz``.
        analytic_tolerance: Max relative residual of the analytic Laplacian channel.
        fd_tolerance: Max relative residual of the finite-difference Laplacian channel.
        dt_transience: Time step for long transience runs.
        dt_martingale: Time step for martingale checks.
        seed: Master seed.
        block_size: Paths simulated together; fixed so results do not depend on the thread count.
    """
    r_max: float = 20.0
    rtol: float = 1e-11
    atol: float = 1e-13
    series_radius: float = 1e-3
    exclusion_radius: float = 1e-6
    fd_step: float = 1e-3
    grid: str = '-2:2:21,-2:2:21,-2:2:21'
    analytic_tolerance: float = 1e-9
    fd_tolerance: float = 1e-5
    dt_transience: float = 1e-3
    dt_martingale: float = 1e-4
    seed: int = 7
    block_size: int = 250


DEFAULTS = Defaults()


def max_workers() -> int:
    """Number of worker threads, capped by ``SOLHARM_THREADS`` when set.

    Raises:
        ValueError: The environment variable is not a positive integer.
    """
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == '':
        return os.cpu_count() or 1
    try:
        workers = int(raw)
    except ValueError:
        raise ValueError(f'{THREADS_ENV} must be a positive integer, got {raw!r}') from None
    if workers < 1:
        raise ValueError(f'{THREADS_ENV} must be a positive integer, got {workers}')
    return workers


def configure_logging(verbosity: int = 0) -> None:
    """Configure root logging on stderr. 0 is WARNING, 1 is INFO, 2 or more is DEBUG."""
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format=LOG_FORMAT)
