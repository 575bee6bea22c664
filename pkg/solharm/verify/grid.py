"""Residuals of the Sol₃ Laplacian over coordinate grids.

Two channels are evaluated. The analytic channel contracts the Laplacian coefficients with the exact
second partials of ũ. The finite-difference channel applies the same coefficients to central second
differences on the 19-point stencil: the centre, the six axis neighbours at ±h, and the twelve plane
diagonals at (±h, ±h). Mixed partials use the four-point cross difference

    u_ij ≈ (u(+h, +h) - u(+h, -h) - u(-h, +h) + u(-h, -h)) / (4h²).

Both channels are O(h²)-free or O(h²) respectively and report the residual relative to |ũ(p)| times the
largest coefficient at p, since the coefficients grow like e^{2|z|}.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from solharm.config import DEFAULTS, max_workers
from solharm.harmonic import HarmonicFunction
from solharm.liegroup import Point, SolGroup

logger = logging.getLogger(__name__)

CHUNK = 2048
ANALYTIC, FINITE_DIFFERENCE = 'analytic', 'finite_difference'


@dataclass(frozen=True)
class GridSpec:
    """A tensor grid in (x, y, z).

    Attributes:
        ranges: ((x0, x1), (y0, y1), (z0, z1)).
        counts: Points per axis, each at least 2.
        exclusion_radius: The analytic channel skips points this close to the base point.
    """
    ranges: tuple
    counts: tuple
    exclusion_radius: float = DEFAULTS.exclusion_radius

    def __post_init__(self) -> None:
        if len(self.ranges) != 3 or len(self.counts) != 3:
            raise ValueError('a grid needs a range and a count for each of x, y, z')
        for (low, high), count in zip(self.ranges, self.counts):
            if not (math.isfinite(low) and math.isfinite(high)):
                raise ValueError(f'grid ranges must be finite, got {self.ranges}')
            if count < 2:
                raise ValueError(f'grid counts must be at least 2, got {self.counts}')
        if self.exclusion_radius < 0:
            raise ValueError(f'exclusion radius must be nonnegative, got {self.exclusion_radius}')

    @classmethod
    def parse(cls, text: str, exclusion_radius: float = DEFAULTS.exclusion_radius) -> GridSpec:
        """Parse ``x0:x1:nx,y0:y1:ny,z0:z1:nz``.

        Raises:
            ValueError: Malformed text or an invalid range or count.
        """
        try:
            axes = [part.split(':') for part in text.split(',')]
            ranges = tuple((float(low), float(high)) for low, high, _ in axes)
            counts = tuple(int(count) for _, _, count in axes)
        except ValueError:
            raise ValueError(f'grid must look like x0:x1:nx,y0:y1:ny,z0:z1:nz, got {text!r}') from None
        return cls(ranges, counts, exclusion_radius)

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    def axes(self) -> list:
        return [np.linspace(low, high, count) for (low, high), count in zip(self.ranges, self.counts)]

    def points(self):
        """Flattened x, y, z arrays in C order of (x, y, z) indices."""
        x, y, z = np.meshgrid(*self.axes(), indexing='ij')
        return x.ravel(), y.ravel(), z.ravel()

    def describe(self) -> str:
        return ','.join(f'{low:g}:{high:g}:{count}' for (low, high), count in zip(self.ranges, self.counts))


@dataclass(frozen=True)
class ResidualReport:
    """Residual statistics of one channel over a grid.

    Attributes:
        channel: ``'analytic'`` or ``'finite_difference'``.
        max_abs: Largest absolute residual.
        max_rel: Largest residual relative to |ũ(p)| times the largest coefficient at p.
        mean_abs: Mean absolute residual.
        worst_point: Where ``max_rel`` is attained.
        grid: Grid description.
        grid_size: Points evaluated; the analytic channel leaves out the exclusion ball.
        h: Finite-difference step (None for the analytic channel).
        a: Shear parameter.
        seed: Seed of the run the report belongs to, if any.
    """
    channel: str
    max_abs: float
    max_rel: float
    mean_abs: float
    worst_point: tuple
    grid: str
    grid_size: int
    h: Optional[float]
    a: float
    seed: Optional[int] = None

    def to_dict(self) -> dict:
        return asdict(self)

    def passed(self, tolerance: float) -> bool:
        return self.max_rel <= tolerance


def fd_hessian(field, x, y, z, h: float):
    """Second partials of ``field`` on the 19-point central stencil, broadcasting over arrays.

    Returns:
        (u_xx, u_xy, u_xz, u_yy, u_yz, u_zz).
    """
    if not h > 0:
        raise ValueError(f'finite-difference step must be positive, got {h}')
    x, y, z = (np.asarray(c, dtype=float) for c in (x, y, z))

    def at(dx, dy, dz):
        return np.asarray(field(x + dx * h, y + dy * h, z + dz * h), dtype=float)

    centre = at(0, 0, 0)
    h2 = h * h

    def pure(e):
        return (at(*e) - 2 * centre + at(*(-c for c in e))) / h2

    def mixed(e, f):
        plus_plus = at(*(a + b for a, b in zip(e, f)))
        plus_minus = at(*(a - b for a, b in zip(e, f)))
        minus_plus = at(*(-a + b for a, b in zip(e, f)))
        minus_minus = at(*(-a - b for a, b in zip(e, f)))
        return (plus_plus - plus_minus - minus_plus + minus_minus) / (4 * h2)

    ex, ey, ez = (1, 0, 0), (0, 1, 0), (0, 0, 1)
    return pure(ex), mixed(ex, ey), mixed(ex, ez), pure(ey), mixed(ey, ez), pure(ez)


def _fd_laplacian(field, x, y, z, group: SolGroup, h: float):
    u_xx, u_xy, _, u_yy, _, u_zz = fd_hessian(field, x, y, z, h)
    c_xx, c_xy, c_yy, c_zz = group.laplacian_coeffs(z)
    return c_xx * u_xx + c_xy * u_xy + c_yy * u_yy + c_zz * u_zz


def fd_laplacian_sol(field, p: Point, group: SolGroup, h: float) -> float:
    """Δ(field) at p from central second differences and the coordinate Laplacian coefficients.

    Args:
        field: Callable of (x, y, z); may broadcast over arrays but need not.
        p: Evaluation point.
        group: Selects the metric.
        h: Difference step, h > 0.
    """
    return float(_fd_laplacian(field, p.x, p.y, p.z, group, h))


def analytic_laplacian(hf: HarmonicFunction, y, z, group: SolGroup):
    """Δũ from the exact partials. u_xx and u_xy vanish identically and enter as exact zeros."""
    _, _, _, u_yy, _, u_zz = hf.derivatives(y, z)
    zeros = np.zeros_like(u_yy)
    c_xx, c_xy, c_yy, c_zz = group.laplacian_coeffs(z)
    return c_xx * zeros + c_xy * zeros + c_yy * u_yy + c_zz * u_zz


def coefficient_scale(group: SolGroup, z):
    return np.max(np.abs(np.stack(group.laplacian_coeffs(z))), axis=0)


def _chunked(function, arrays, workers: int):
    """Apply ``function`` to fixed-size chunks of the flattened arrays and concatenate in order."""
    size = arrays[0].size
    bounds = [(start, min(start + CHUNK, size)) for start in range(0, size, CHUNK)]

    def run(bound):
        start, stop = bound
        return function(*(a[start:stop] for a in arrays))

    if workers <= 1 or len(bounds) <= 1:
        pieces = [run(bound) for bound in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            pieces = list(pool.map(run, bounds))
    return np.concatenate(pieces) if pieces else np.empty(0)


def _report(channel, residual, scale, x, y, z, spec, group, h, seed) -> ResidualReport:
    absolute = np.abs(residual)
    relative = absolute / scale
    if absolute.size == 0:
        return ResidualReport(channel, 0.0, 0.0, 0.0, (), spec.describe(), 0, h, group.a, seed)
    worst = int(np.argmax(relative))
    return ResidualReport(channel=channel,
                          max_abs=float(absolute.max()),
                          max_rel=float(relative[worst]),
                          mean_abs=float(absolute.mean()),
                          worst_point=(float(x[worst]), float(y[worst]), float(z[worst])),
                          grid=spec.describe(),
                          grid_size=int(absolute.size),
                          h=h,
                          a=group.a,
                          seed=seed)


def fd_residuals(field, spec: GridSpec, group: SolGroup, h: float, keep=None, workers: Optional[int] = None,
                 seed: Optional[int] = None) -> ResidualReport:
    """Finite-difference residual report of an arbitrary field over a grid.

    Args:
        field: Vectorized callable of (x, y, z).
        spec: Grid.
        group: Selects the metric.
        h: Difference step.
        keep: Optional boolean mask over the flattened grid.
        workers: Thread count; defaults to :func:`solharm.config.max_workers`.
        seed: Recorded in the report.
    """
    workers = max_workers() if workers is None else workers
    x, y, z = spec.points()
    if keep is not None:
        x, y, z = x[keep], y[keep], z[keep]
    residual = _chunked(lambda *c: _fd_laplacian(field, *c, group, h), (x, y, z), workers)
    values = _chunked(lambda *c: np.asarray(field(*c), dtype=float), (x, y, z), workers)
    scale = np.maximum(np.abs(values), np.finfo(float).tiny) * coefficient_scale(group, z)
    return _report(FINITE_DIFFERENCE, residual, scale, x, y, z, spec, group, h, seed)


def residual_grid(hf: HarmonicFunction, spec: GridSpec, group: SolGroup, h: float = DEFAULTS.fd_step,
                  workers: Optional[int] = None, seed: Optional[int] = None):
    """Residuals of Δũ = 0 over a grid in both channels.

    The analytic channel skips points within ``spec.exclusion_radius`` of the base point, where the exact
    partials are undefined. Since ũ ignores x this is the whole line of points above the base point. The
    finite-difference channel covers every grid point.

    Returns:
        (analytic report, finite-difference report).
    """
    workers = max_workers() if workers is None else workers
    x, y, z = spec.points()
    keep = hf.radius(y, z) >= spec.exclusion_radius
    logger.info('residual grid %s at a=%g: %d of %d points kept, h=%g, %d workers',
                spec.describe(), group.a, int(keep.sum()), spec.size, h, workers)
    xk, yk, zk = x[keep], y[keep], z[keep]
    analytic = _chunked(lambda _, yc, zc: analytic_laplacian(hf, yc, zc, group), (xk, yk, zk), workers)
    values = _chunked(hf, (xk, yk, zk), workers)
    scale = np.abs(values) * coefficient_scale(group, zk)
    analytic_report = _report(ANALYTIC, analytic, scale, xk, yk, zk, spec, group, None, seed)
    fd_report = fd_residuals(hf, spec, group, h, workers=workers, seed=seed)
    logger.info('analytic max_rel=%.3g, finite-difference max_rel=%.3g',
                analytic_report.max_rel, fd_report.max_rel)
    return analytic_report, fd_report


def channel_agreement(hf: HarmonicFunction, spec: GridSpec, group: SolGroup, h: float = DEFAULTS.fd_step) -> float:
    """Largest relative gap between the analytic and finite-difference Laplacians over the grid."""
    x, y, z = spec.points()
    keep = hf.radius(y, z) >= spec.exclusion_radius
    x, y, z = x[keep], y[keep], z[keep]
    gap = np.abs(analytic_laplacian(hf, y, z, group) - _fd_laplacian(hf, x, y, z, group, h))
    if gap.size == 0:
        return 0.0
    return float((gap / (hf(x, y, z) * coefficient_scale(group, z))).max())


def fd_convergence_ratio(field, exact, points, group: SolGroup, h: float) -> float:
    """max|Δ_h f - Δf| / max|Δ_{h/2} f - Δf| over the given points; about 4 for a second-order stencil.

    Args:
        field: Vectorized callable of (x, y, z).
        exact: Vectorized callable returning the exact Laplacian of ``field``.
        points: (x, y, z) arrays.
        group: Selects the metric.
        h: Coarse step.
    """
    x, y, z = (np.asarray(c, dtype=float) for c in points)
    truth = exact(x, y, z)
    coarse = np.abs(_fd_laplacian(field, x, y, z, group, h) - truth).max()
    fine = np.abs(_fd_laplacian(field, x, y, z, group, h / 2) - truth).max()
    return float(coarse / fine)
